#include "rideshare/scenario.hpp"
#include "rideshare/lap.hpp"
#include "rideshare/protocols.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace rideshare {

namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  bool present(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail("missing key '" + key + "'");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return convert<T>(j_.at(key), key);
  }

  template <typename T>
  T require(const std::string& key) {
    return convert<T>(raw(key), key);
  }

  Reader child(const std::string& key) { return Reader(raw(key), where_ + "." + key); }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.contains(item.key())) fail("unknown key '" + item.key() + "'");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where_ + ": " + what); }
  const std::string& where() const { return where_; }

 private:
  template <typename T>
  T convert(const json& v, const std::string& key) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail("'" + key + "' must be true or false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
          fail("'" + key + "' must be nonnegative");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail("'" + key + "' must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail("'" + key + "' must be a string");
    }
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      fail("'" + key + "' has the wrong type");
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

NetworkSpec read_network(Reader r, const std::filesystem::path& base) {
  NetworkSpec spec;
  const auto kind = r.require<std::string>("kind");
  if (kind == "grid") {
    spec.kind = TravelNetwork::Kind::grid;
    spec.width = r.require<int>("width");
    spec.height = r.require<int>("height");
    spec.seconds_per_edge = r.get<Seconds>("seconds_per_edge", 60);
    if (spec.width < 1 || spec.height < 1 || spec.width * spec.height < 2)
      r.fail("grid needs at least two nodes");
    if (spec.seconds_per_edge < 1) r.fail("seconds_per_edge must be positive");
  } else if (kind == "matrix") {
    spec.kind = TravelNetwork::Kind::matrix;
    spec.path = resolve(base, r.require<std::string>("path"));
  } else {
    r.fail("unknown network kind '" + kind + "'");
  }
  r.finish();
  return spec;
}

PreferenceSpec read_preferences(Reader r, int companies) {
  PreferenceSpec p;
  p.fraction = r.get<double>("fraction", 0.0);
  p.weights = r.get<std::vector<double>>("weights", {});
  p.threshold_base_min = r.get<int>("threshold_base_min", 5);
  p.never_switch = r.get<bool>("never_switch", false);
  if (!(p.fraction >= 0.0 && p.fraction <= 1.0)) r.fail("fraction must lie in [0, 1]");
  if (static_cast<int>(p.weights.size()) > companies) r.fail("more weights than companies");
  for (double w : p.weights)
    if (!(w >= 0.0)) r.fail("weights must be nonnegative");
  if (!p.weights.empty() && std::accumulate(p.weights.begin(), p.weights.end(), 0.0) <= 0.0)
    r.fail("weights must not all be zero");
  if (p.threshold_base_min < 0 || p.threshold_base_min > 30) r.fail("threshold_base_min must lie in [0, 30]");
  r.finish();
  return p;
}

DemandParams read_synthetic(Reader& r, int companies, Seconds default_duration) {
  DemandParams d;
  d.rate_per_s = r.require<double>("rate_per_s");
  d.start = r.get<Seconds>("start_s", 0);
  d.duration = r.get<Seconds>("duration_s", default_duration);
  d.max_wait = r.get<Seconds>("max_wait_s", kDefaultMaxWait);
  d.max_detour = r.get<Seconds>("max_detour_s", kDefaultMaxDetour);
  if (r.has("preferences")) d.preferences = read_preferences(r.child("preferences"), companies);
  if (!(d.rate_per_s > 0.0)) r.fail("rate_per_s must be positive");
  if (d.duration <= 0) r.fail("duration_s must be positive");
  if (d.start < 0) r.fail("start_s must be nonnegative");
  if (d.max_wait < 0 || d.max_detour < 0) r.fail("max_wait_s and max_detour_s must be nonnegative");
  return d;
}

ProtocolConfig read_protocol_cfg(Reader& r) {
  ProtocolConfig cfg;
  cfg.epsilon = r.get<double>("epsilon", cfg.epsilon);
  cfg.k_coop = r.get<long>("k_coop", cfg.k_coop);
  cfg.k_comp = r.get<long>("k_comp", cfg.k_comp);
  // An explicit null disables broker tie-breaking.
  if (r.has("broker_seed"))
    cfg.broker_seed = r.require<std::uint64_t>("broker_seed");
  else if (r.present("broker_seed"))
    cfg.broker_seed = std::nullopt;
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  return cfg;
}

ProtocolKind read_kind(Reader& r) {
  const auto name = r.require<std::string>("kind");
  try {
    return protocol_from_string(name);
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(text, "scenario");
  Reader top(doc, "scenario");
  ScenarioFile s;
  s.sim.seed = top.get<std::uint64_t>("seed", 1);
  s.network = read_network(top.child("network"), base_dir);

  const json& companies = top.raw("companies");
  if (!companies.is_array() || companies.empty()) top.fail("companies must be a nonempty array");
  for (std::size_t p = 0; p < companies.size(); ++p) {
    Reader c(companies[p], "scenario.companies[" + std::to_string(p) + "]");
    CompanySpec spec;
    spec.name = c.get<std::string>("name", "company" + std::to_string(p));
    spec.fleet_size = c.require<int>("fleet_size");
    spec.capacity = c.get<int>("capacity", kDefaultCapacity);
    spec.bias_fraction = c.get<double>("bias", 0.0);
    spec.noise_sigma = c.get<double>("noise_sigma", 0.0);
    c.finish();
    s.sim.companies.push_back(spec);
  }
  const int P = static_cast<int>(s.sim.companies.size());

  if (top.has("sim")) {
    Reader r = top.child("sim");
    s.sim.batch_period = r.get<Seconds>("batch_period_s", s.sim.batch_period);
    s.sim.context_k = r.get<int>("context_k", s.sim.context_k);
    s.sim.context_radius = r.get<Seconds>("context_radius_s", s.sim.context_radius);
    s.sim.rebalance_wait = r.get<Seconds>("rebalance_wait_s", s.sim.rebalance_wait);
    s.sim.rebalance_detour = r.get<Seconds>("rebalance_detour_s", s.sim.rebalance_detour);
    s.sim.rebalance_radius = r.get<Seconds>("rebalance_radius_s", s.sim.rebalance_radius);
    s.sim.warmup = r.get<Seconds>("warmup_s", s.sim.warmup);
    s.sim.horizon = r.get<Seconds>("horizon_s", s.sim.horizon);
    r.finish();
  }

  {
    Reader r = top.child("protocol");
    s.sim.protocol = read_kind(r);
    s.sim.protocol_cfg = read_protocol_cfg(r);
    const auto backend = r.get<std::string>("backend", "auction");
    if (backend == "auction") s.sim.backend = LapBackend::auction;
    else if (backend == "brute_force") s.sim.backend = LapBackend::brute_force;
    else r.fail("unknown backend '" + backend + "'");
    r.finish();
  }

  {
    Reader r = top.child("demand");
    const auto kind = r.require<std::string>("kind");
    if (kind == "file") {
      s.demand.from_file = true;
      s.demand.path = resolve(base_dir, r.require<std::string>("path"));
    } else if (kind == "synthetic") {
      s.demand.synthetic = read_synthetic(r, P, s.sim.warmup + s.sim.horizon);
    } else {
      r.fail("unknown demand kind '" + kind + "'");
    }
    r.finish();
  }
  top.finish();

  try {
    validate(s.sim);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return s;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.parent_path());
}

DemandFile parse_demand_file(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(text, "demand parameters");
  Reader top(doc, "demand parameters");
  DemandFile d;
  d.network = read_network(top.child("network"), base_dir);
  d.companies = top.get<int>("companies", 2);
  if (d.companies < 1) top.fail("companies must be at least 1");
  Reader r = top.child("demand");
  d.demand = read_synthetic(r, d.companies, 0);
  r.finish();
  top.finish();
  return d;
}

DemandFile load_demand_file(const std::filesystem::path& path) {
  return parse_demand_file(read_file(path), path.parent_path());
}

TravelNetwork build_network(const NetworkSpec& spec) {
  if (spec.kind == TravelNetwork::Kind::grid)
    return TravelNetwork::grid(spec.width, spec.height, spec.seconds_per_edge);
  std::ifstream in(spec.path);
  if (!in) throw IoError("cannot read " + spec.path.string());
  try {
    return read_matrix_network(in);
  } catch (const DataError& e) {
    throw DataError(spec.path.string() + ": " + e.what());
  }
}

std::vector<TripRequest> load_requests(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return read_requests_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<TripRequest> generate_demand(const DemandParams& params, const TravelNetwork& net,
                                         int companies, std::uint64_t seed) {
  if (!(params.rate_per_s > 0.0) || params.duration <= 0)
    throw ConfigError("demand needs a positive rate and duration");
  if (net.node_count() < 2) throw ConfigError("demand needs at least two nodes");

  std::mt19937_64 arrivals(derive_seed(seed, 1));
  std::mt19937_64 places(derive_seed(seed, 2));
  std::mt19937_64 tastes(derive_seed(seed, 3));
  std::exponential_distribution<double> gap(params.rate_per_s);
  std::uniform_int_distribution<NodeId> any_node(0, net.node_count() - 1);
  std::uniform_int_distribution<NodeId> other_node(0, net.node_count() - 2);
  std::bernoulli_distribution has_pref(params.preferences.fraction);

  std::vector<double> weights = params.preferences.weights;
  if (weights.empty()) weights = companies >= 2 ? std::vector<double>{1.0, 1.0} : std::vector<double>{1.0};
  std::discrete_distribution<CompanyId> preferred(weights.begin(), weights.end());
  std::vector<double> thresholds;
  for (int s = params.preferences.threshold_base_min; s <= 30; s += 5) thresholds.push_back(60.0 * s);
  thresholds.push_back(60.0 * 120);
  std::uniform_int_distribution<std::size_t> pick_threshold(0, thresholds.size() - 1);

  std::vector<TripRequest> out;
  const double end = static_cast<double>(params.start + params.duration);
  double t = static_cast<double>(params.start);
  while (true) {
    t += gap(arrivals);
    if (t >= end) break;
    TripRequest r;
    r.id = static_cast<RequestId>(out.size());
    r.submit_time = static_cast<Seconds>(std::floor(t));
    r.origin = Location{any_node(places)};
    const NodeId d = other_node(places);
    r.destination = Location{d >= r.origin.node ? d + 1 : d};
    r.max_wait = params.max_wait;
    r.max_detour = params.max_detour;
    if (has_pref(tastes)) {
      Preference p;
      p.company = preferred(tastes);
      p.switching_threshold = params.preferences.never_switch ? kNeverSwitch : thresholds[pick_threshold(tastes)];
      r.preference = p;
    }
    out.push_back(r);
  }
  return out;
}

std::vector<TripRequest> scenario_requests(const ScenarioFile& scenario, const TravelNetwork& net) {
  std::vector<TripRequest> requests;
  if (scenario.demand.from_file) {
    requests = load_requests(scenario.demand.path);
  } else {
    requests = generate_demand(scenario.demand.synthetic, net, static_cast<int>(scenario.sim.companies.size()),
                               derive_seed(scenario.sim.seed, 0xDE3A4D));
  }
  const auto P = static_cast<CompanyId>(scenario.sim.companies.size());
  for (const auto& r : requests) {
    if (!net.valid(r.origin) || !net.valid(r.destination))
      throw DataError("request " + std::to_string(r.id) + " references a node outside the network");
    if (r.preference && (r.preference->company < 0 || r.preference->company >= P))
      throw DataError("request " + std::to_string(r.id) + " prefers an unknown company");
  }
  return requests;
}

std::string report_json(const ScenarioReport& report, const ScenarioFile& scenario) {
  nlohmann::ordered_json j;
  j["protocol"] = to_string(scenario.sim.protocol);
  j["seed"] = scenario.sim.seed;
  j["total_requests"] = report.total_requests;
  j["served"] = report.served;
  j["service_rate_pct"] = report.service_rate;
  j["mean_wait_min"] = report.mean_wait_min;
  j["mean_detour_min"] = report.mean_detour_min;
  j["mean_rounds"] = report.mean_rounds;
  j["companies"] = nlohmann::ordered_json::array();
  for (const auto& c : report.companies) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["fleet_size"] = c.fleet_size;
    cj["fleet_share_pct"] = c.fleet_share;
    cj["served_share_pct"] = c.served_share;
    cj["egalitarian_gap_pp"] = c.egalitarian_gap;
    cj["mean_wait_min"] = c.mean_wait_min;
    cj["mean_detour_min"] = c.mean_detour_min;
    cj["mean_occupancy"] = c.mean_occupancy;
    j["companies"].push_back(std::move(cj));
  }
  return j.dump(2) + "\n";
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioFile& scenario, const RunOptions& options) {
  const TravelNetwork net = build_network(scenario.network);
  const auto requests = scenario_requests(scenario, net);

  if (!options.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw IoError("cannot create " + options.out_dir.string() + ": " + ec.message());
  }

  Simulator sim(scenario.sim, net);
  std::ofstream events;
  if (options.trace && !options.out_dir.empty()) {
    events = open_out(options.out_dir / "events.jsonl");
    sim.set_event_sink(&events);
  }
  const ScenarioReport report = sim.run(requests);

  if (!options.out_dir.empty()) {
    auto rj = open_out(options.out_dir / "report.json");
    rj << report_json(report, scenario);
    auto mc = open_out(options.out_dir / "metrics.csv");
    sim.write_metrics_csv(mc);
    if (!rj || !mc) throw IoError("failed writing into " + options.out_dir.string());
  }
  return report;
}

SweepSpec parse_sweep(const std::string& text) {
  const json doc = parse_json(text, "sweep");
  Reader top(doc, "sweep");
  SweepSpec spec;
  spec.seed = top.get<std::uint64_t>("seed", 1);
  spec.network = read_network(top.child("network"), {});
  if (spec.network.kind != TravelNetwork::Kind::grid) top.fail("sweeps need a grid network");
  if (top.has("protocol")) {
    Reader r = top.child("protocol");
    spec.protocol = read_protocol_cfg(r);
    r.finish();
  }
  spec.brute_force_max = top.get<int>("brute_force_max", spec.brute_force_max);
  if (spec.brute_force_max < 0 || spec.brute_force_max > kBruteForceMaxSize)
    top.fail("brute_force_max must lie in [0, 10]");

  const json& cells = top.raw("cells");
  if (!cells.is_array() || cells.empty()) top.fail("cells must be a nonempty array");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    Reader r(cells[k], "sweep.cells[" + std::to_string(k) + "]");
    SweepCell c;
    c.name = r.get<std::string>("name", "cell" + std::to_string(k));
    const auto protocol = r.require<std::string>("protocol");
    try {
      c.protocol = protocol_from_string(protocol);
    } catch (const ConfigError& e) {
      r.fail(e.what());
    }
    c.size = r.require<int>("size");
    c.shares = r.get<std::vector<double>>("shares", {100.0});
    c.noise_sigma = r.get<double>("noise_sigma_min", 0.0);
    c.bias = r.get<double>("bias", 0.0);
    c.preference_fraction = r.get<double>("preference_fraction", 0.0);
    if (r.has("threshold_min") && r.raw("threshold_min").is_string()) {
      if (r.raw("threshold_min").get<std::string>() != "inf") r.fail("threshold_min must be a number or \"inf\"");
      c.threshold_min = kNeverSwitch;
    } else {
      c.threshold_min = r.get<double>("threshold_min", kNeverSwitch);
    }
    c.instances = r.get<int>("instances", c.instances);
    r.finish();

    if (c.size < 1) r.fail("size must be positive");
    if (c.shares.empty() || static_cast<int>(c.shares.size()) > c.size) r.fail("need 1..size companies");
    for (double s : c.shares)
      if (!(s > 0.0)) r.fail("shares must be positive");
    if (!(c.noise_sigma >= 0.0)) r.fail("noise_sigma_min must be nonnegative");
    if (!(c.bias >= 0.0 && c.bias < 1.0)) r.fail("bias must lie in [0, 1)");
    if (!(c.preference_fraction >= 0.0 && c.preference_fraction <= 1.0))
      r.fail("preference_fraction must lie in [0, 1]");
    if (!(c.threshold_min >= 0.0)) r.fail("threshold_min must be nonnegative");
    if (c.instances < 1) r.fail("instances must be at least 1");
    spec.cells.push_back(std::move(c));
  }
  top.finish();
  return spec;
}

SweepSpec load_sweep(const std::filesystem::path& path) { return parse_sweep(read_file(path)); }

namespace {

// Row owners for the given percent split, by largest remainder; every
// company keeps at least one vehicle.
std::vector<CompanyId> split_rows(int n, const std::vector<double>& shares) {
  const double total = std::accumulate(shares.begin(), shares.end(), 0.0);
  const auto P = shares.size();
  std::vector<int> count(P, 1);
  int left = n - static_cast<int>(P);
  std::vector<double> want(P);
  for (std::size_t p = 0; p < P; ++p) want[p] = std::max(0.0, n * shares[p] / total - 1.0);
  for (std::size_t p = 0; p < P; ++p) {
    const int whole = std::min(left, static_cast<int>(std::floor(want[p])));
    count[p] += whole;
    left -= whole;
    want[p] -= whole;
  }
  while (left > 0) {
    const auto p = static_cast<std::size_t>(std::max_element(want.begin(), want.end()) - want.begin());
    ++count[p];
    want[p] = -1.0;
    --left;
  }
  std::vector<CompanyId> rows;
  for (std::size_t p = 0; p < P; ++p) rows.insert(rows.end(), static_cast<std::size_t>(count[p]), static_cast<CompanyId>(p));
  return rows;
}

}  // namespace

SweepInstance make_sweep_instance(const SweepSpec& spec, const SweepCell& cell, int index) {
  const TravelNetwork net = build_network(spec.network);
  const int n = cell.size;
  const auto P = static_cast<int>(cell.shares.size());
  SweepInstance inst;

  std::mt19937_64 world(derive_seed(spec.seed, 0x57A7, n, index));
  std::uniform_int_distribution<NodeId> any_node(0, net.node_count() - 1);
  std::uniform_int_distribution<NodeId> other_node(0, net.node_count() - 2);
  std::vector<Location> vehicles(static_cast<std::size_t>(n)), origins(vehicles), destinations(vehicles);
  for (auto& v : vehicles) v = Location{any_node(world)};
  for (int j = 0; j < n; ++j) {
    origins[static_cast<std::size_t>(j)] = Location{any_node(world)};
    const NodeId d = other_node(world);
    destinations[static_cast<std::size_t>(j)] = Location{d >= origins[static_cast<std::size_t>(j)].node ? d + 1 : d};
  }
  inst.true_costs.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const Seconds t = net.travel_time(vehicles[static_cast<std::size_t>(i)], origins[ju]) +
                        net.travel_time(origins[ju], destinations[ju]);
      inst.true_costs(i, j) = static_cast<double>(t) / 60.0;
    }

  inst.company_of_row = split_rows(n, cell.shares);

  // Perturbation streams depend on the instance and market layout but not on
  // the noise or bias level, so those levels are compared on shared draws.
  const std::uint64_t market = derive_seed(spec.seed, 0xB1A5, n, P, index);
  std::mt19937_64 bias_rng(derive_seed(market, 0));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> bias(static_cast<std::size_t>(P));
  for (auto& b : bias) b = cell.bias * unit(bias_rng);
  std::vector<std::mt19937_64> noise;
  for (int p = 0; p < P; ++p) noise.emplace_back(derive_seed(market, 1, p));
  inst.perceived = inst.true_costs;
  for (int i = 0; i < n; ++i) {
    const auto p = static_cast<std::size_t>(inst.company_of_row[static_cast<std::size_t>(i)]);
    for (int j = 0; j < n; ++j)
      inst.perceived(i, j) = apply_bias(apply_noise(inst.true_costs(i, j), cell.noise_sigma, noise[p]), bias[p]);
  }

  inst.preferences.assign(static_cast<std::size_t>(n), std::nullopt);
  std::mt19937_64 tastes(derive_seed(market, 2));
  std::bernoulli_distribution has_pref(cell.preference_fraction);
  std::uniform_int_distribution<CompanyId> company(0, P - 1);
  for (auto& pref : inst.preferences) {
    const bool wants = has_pref(tastes);
    const CompanyId c = company(tastes);
    if (wants) pref = Preference{c, cell.threshold_min};
  }
  return inst;
}

CellResult run_sweep_cell(const SweepSpec& spec, const SweepCell& cell) {
  CellResult result;
  result.cell = cell;
  double rounds = 0.0;
  for (int k = 0; k < cell.instances; ++k) {
    const SweepInstance inst = make_sweep_instance(spec, cell, k);
    ProtocolConfig cfg = spec.protocol;
    if (cfg.broker_seed) cfg.broker_seed = derive_seed(*cfg.broker_seed, spec.seed, cell.size, k);
    ProtocolResult r;
    switch (cell.protocol) {
      case ProtocolKind::centralized: r = run_centralized(inst.perceived, cfg); break;
      case ProtocolKind::cooperative: r = run_cooperative(inst.perceived, inst.company_of_row, cfg); break;
      case ProtocolKind::competitive:
        r = run_competitive(inst.perceived, inst.company_of_row, inst.preferences, cfg);
        break;
    }
    const double achieved = assignment_cost(inst.true_costs, r.assignment.pairs);
    const double optimum = cell.size <= spec.brute_force_max ? solve_brute_force(inst.true_costs).objective
                                                             : solve_exact(inst.true_costs).objective;
    const double gap = optimum > 0 ? 100.0 * (achieved - optimum) / optimum : 0.0;
    result.gaps.push_back(gap);
    rounds += static_cast<double>(r.rounds);
  }
  result.mean_gap = std::accumulate(result.gaps.begin(), result.gaps.end(), 0.0) / cell.instances;
  result.max_gap = *std::max_element(result.gaps.begin(), result.gaps.end());
  result.mean_rounds = rounds / cell.instances;
  return result;
}

std::vector<CellResult> run_static_sweep(const SweepSpec& spec) {
  std::vector<CellResult> out;
  for (const auto& cell : spec.cells) out.push_back(run_sweep_cell(spec, cell));
  return out;
}

void write_gaps_csv(std::ostream& out, const std::vector<CellResult>& results) {
  out << kGapCsvHeader << '\n';
  for (const auto& r : results) {
    const auto& c = r.cell;
    std::string shares;
    for (std::size_t p = 0; p < c.shares.size(); ++p) shares += (p ? "/" : "") + format_number(c.shares[p]);
    out << c.name << ',' << to_string(c.protocol) << ',' << c.size << ',' << c.shares.size() << ',' << shares << ','
        << format_number(c.noise_sigma) << ',' << format_number(c.bias) << ',' << format_number(c.preference_fraction)
        << ',' << format_number(c.threshold_min) << ',' << c.instances << ',' << format_number(r.mean_gap) << ','
        << format_number(r.max_gap) << ',' << format_number(r.mean_rounds) << '\n';
  }
}

}  // namespace rideshare
