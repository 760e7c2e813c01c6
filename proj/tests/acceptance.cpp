// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "rideshare/lap.hpp"
#include "rideshare/protocols.hpp"
#include "rideshare/scenario.hpp"
#include "rideshare/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace rideshare;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Verdict& v) {
  std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << title << "): " << v.detail
            << std::endl;
  if (!v.pass) ++failures;
}

std::string fixed(double x, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

// Every company gets at least one row; the rest are spread at random.
std::vector<CompanyId> random_partition(Index n, int companies, std::mt19937_64& rng) {
  std::vector<CompanyId> rows(static_cast<std::size_t>(n));
  std::uniform_int_distribution<CompanyId> pick(0, companies - 1);
  for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i < companies ? static_cast<CompanyId>(i) : pick(rng);
  std::shuffle(rows.begin(), rows.end(), rng);
  return rows;
}

ProtocolConfig unlimited(double epsilon) {
  ProtocolConfig cfg;
  cfg.epsilon = epsilon;
  cfg.k_coop = std::numeric_limits<long>::max();
  cfg.k_comp = std::numeric_limits<long>::max();
  return cfg;
}

struct CoopRun {
  Index n = 0;
  double max_cost = 0.0;
  double epsilon = 0.0;
  long rounds = 0;
};

std::vector<CoopRun> coop_runs;

Verdict cooperative_exactness() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> cost(1, 1000);
  int exact = 0;
  const auto start = Clock::now();
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + t % 7;
    CostMatrix c(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) c(i, j) = cost(rng);
    const int companies = std::uniform_int_distribution<int>(2, static_cast<int>(std::min<Index>(5, n)))(rng);
    const auto rows = random_partition(n, companies, rng);
    const double eps = 0.1 / static_cast<double>(n);
    const auto r = run_cooperative(c, rows, unlimited(eps));
    if (r.assignment.objective == solve_brute_force(c).objective) ++exact;
    coop_runs.push_back({n, c.maxCoeff(), eps, r.rounds});
  }
  const double elapsed = seconds_since(start);
  return {exact == 100 && elapsed < 5.0,
          std::to_string(exact) + "/100 optimal, " + fixed(elapsed) + " s (limit 5 s)"};
}

Verdict cooperative_within_n_epsilon() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> cost(0.0, 100.0);
  const double eps_levels[] = {0.5, 1.0, 5.0};
  int ok = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index n = 1 + t % 8;
    CostMatrix c(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) c(i, j) = cost(rng);
    const double eps = eps_levels[t % 3];
    const int companies = std::uniform_int_distribution<int>(1, static_cast<int>(std::min<Index>(5, n)))(rng);
    const auto r = run_cooperative(c, random_partition(n, companies, rng), unlimited(eps));
    const double excess = r.assignment.objective - solve_brute_force(c).objective;
    if (excess >= -1e-9 && excess <= static_cast<double>(n) * eps + 1e-9) ++ok;
    worst = std::max(worst, excess / (static_cast<double>(n) * eps));
    coop_runs.push_back({n, c.maxCoeff(), eps, r.rounds});
  }
  return {ok == 100, std::to_string(ok) + "/100 within n*eps, worst excess " + fixed(worst) + " of n*eps"};
}

Verdict iteration_bounds() {
  int coop_ok = 0;
  for (const auto& run : coop_runs)
    if (run.rounds <= cooperative_iteration_bound(run.n, run.n, run.max_cost, run.epsilon)) ++coop_ok;

  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> cost(1.0, 100.0);
  int comp_ok = 0;
  long worst_rounds = 0;
  for (int t = 0; t < 200; ++t) {
    const int P = 2 + t % 4;
    CostMatrix c(P, P);
    for (Index i = 0; i < P; ++i)
      for (Index j = 0; j < P; ++j) c(i, j) = cost(rng);
    std::vector<CompanyId> rows(static_cast<std::size_t>(P));
    std::iota(rows.begin(), rows.end(), 0);
    ProtocolConfig cfg = unlimited(0.01);
    cfg.broker_seed = static_cast<std::uint64_t>(t);
    const auto r = run_competitive(c, rows, {}, cfg);
    // rounds counts the final round that places the last request; the bound
    // counts rounds after the first.
    if (r.assignment.pairs.size() == static_cast<std::size_t>(P) &&
        r.rounds - 1 <= competitive_iteration_bound(P, P))
      ++comp_ok;
    worst_rounds = std::max(worst_rounds, r.rounds);
  }
  const auto total = static_cast<int>(coop_runs.size());
  return {coop_ok == total && comp_ok == 200,
          "cooperative " + std::to_string(coop_ok) + "/" + std::to_string(total) + ", competitive " +
              std::to_string(comp_ok) + "/200 (most rounds " + std::to_string(worst_rounds) + ")"};
}

bool triangle_like(const CostMatrix& c) {
  for (Index i = 0; i < c.rows(); ++i)
    for (Index j = 0; j < c.cols(); ++j)
      for (Index k = 0; k < c.rows(); ++k)
        for (Index l = 0; l < c.cols(); ++l)
          if (c(i, j) > c(i, l) + c(k, l) + c(k, j) + 1e-9) return false;
  return true;
}

// Vehicles and requests on a grid; cost is the pickup leg plus the trip.
CostMatrix grid_instance(Index n, const TravelNetwork& net, std::mt19937_64& rng) {
  std::uniform_int_distribution<NodeId> node(0, net.node_count() - 1);
  std::vector<Location> vehicles(static_cast<std::size_t>(n)), origins(static_cast<std::size_t>(n)),
      destinations(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    vehicles[static_cast<std::size_t>(k)] = Location{node(rng)};
    origins[static_cast<std::size_t>(k)] = Location{node(rng)};
    do destinations[static_cast<std::size_t>(k)] = Location{node(rng)};
    while (destinations[static_cast<std::size_t>(k)] == origins[static_cast<std::size_t>(k)]);
  }
  CostMatrix c(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const auto o = origins[static_cast<std::size_t>(j)];
      c(i, j) = static_cast<double>(net.travel_time(vehicles[static_cast<std::size_t>(i)], o) +
                                    net.travel_time(o, destinations[static_cast<std::size_t>(j)])) /
                60.0;
    }
  return c;
}

Verdict competitive_worst_case() {
  CostMatrix adapted(2, 2);
  adapted << 1.1, 0.9, 3.0, 1.0;
  const double ratio = run_competitive(adapted, {0, 1}, {}, {}).assignment.objective /
                       solve_brute_force(adapted).objective;
  const bool adapted_ok = ratio >= 1.85 && ratio < 2.0;

  const auto net = TravelNetwork::grid(12, 12, 60);
  std::mt19937_64 rng(1004);
  double worst2 = 0.0, worst3 = 0.0;
  int checked = 0;
  for (int t = 0; t < 2000; ++t) {
    const bool duo = t < 1000;
    const Index n = duo ? 2 + t % 7 : 3 + t % 6;
    const CostMatrix c = grid_instance(n, net, rng);
    if (!triangle_like(c)) continue;
    ++checked;
    const int companies = duo ? 2 : std::uniform_int_distribution<int>(3, static_cast<int>(std::min<Index>(5, n)))(rng);
    ProtocolConfig cfg = unlimited(0.01);
    cfg.broker_seed = static_cast<std::uint64_t>(t);
    const auto r = run_competitive(c, random_partition(n, companies, rng), {}, cfg);
    const double q = r.assignment.objective / solve_brute_force(c).objective;
    (duo ? worst2 : worst3) = std::max(duo ? worst2 : worst3, q);
  }
  return {adapted_ok && checked == 2000 && worst2 <= 2.0 + 1e-9 && worst3 <= 3.0 + 1e-9,
          "adapted ratio " + fixed(ratio) + ", triangle-checked " + std::to_string(checked) +
              "/2000, max ratio 2 companies " + fixed(worst2) + ", 3+ companies " + fixed(worst3)};
}

Verdict static_sweep() {
  SweepSpec spec;
  spec.seed = 2024;
  spec.network.width = 12;
  spec.network.height = 12;
  spec.network.seconds_per_edge = 60;
  spec.protocol.epsilon = 0.01;
  spec.protocol.k_coop = std::numeric_limits<long>::max();
  spec.protocol.k_comp = 1000;

  auto cell = [](std::string name, ProtocolKind kind, int size, std::vector<double> shares) {
    SweepCell c;
    c.name = std::move(name);
    c.protocol = kind;
    c.size = size;
    c.shares = std::move(shares);
    c.instances = 100;
    return c;
  };
  auto gap = [&](const SweepCell& c) { return run_sweep_cell(spec, c); };
  const std::vector<double> market{53, 35, 12};

  auto coop = cell("coop", ProtocolKind::cooperative, 30, market);
  const auto clean = gap(coop);
  std::vector<double> noise_gaps{clean.mean_gap}, bias_gaps{clean.mean_gap};
  for (double sigma : {1.0, 3.0}) {
    auto c = coop;
    c.noise_sigma = sigma;
    noise_gaps.push_back(gap(c).mean_gap);
  }
  for (double b : {0.1, 0.3}) {
    auto c = coop;
    c.bias = b;
    bias_gaps.push_back(gap(c).mean_gap);
  }
  const double two = gap(cell("comp2", ProtocolKind::competitive, 20, {50, 50})).mean_gap;
  const double three = gap(cell("comp3", ProtocolKind::competitive, 20, {1, 1, 1})).mean_gap;
  const double mono = gap(cell("mono", ProtocolKind::competitive, 20, {100})).max_gap;
  const double skewed = gap(cell("comp9010", ProtocolKind::competitive, 20, {90, 10})).mean_gap;

  const bool clean_ok = clean.max_gap == 0.0;
  const bool noise_ok = std::is_sorted(noise_gaps.begin(), noise_gaps.end());
  const bool bias_ok = std::is_sorted(bias_gaps.begin(), bias_gaps.end());
  const bool companies_ok = two <= three;
  const bool market_ok = mono == 0.0 && two >= skewed;
  auto list = [](const std::vector<double>& v) {
    return fixed(v[0]) + " / " + fixed(v[1]) + " / " + fixed(v[2]);
  };
  return {clean_ok && noise_ok && bias_ok && companies_ok && market_ok,
          "clean max gap " + fixed(clean.max_gap) + "%, noise " + list(noise_gaps) + "%, bias " + list(bias_gaps) +
              "%, competitive 2 vs 3 companies " + fixed(two) + " vs " + fixed(three) + "%, monopoly max " +
              fixed(mono) + "%, 50/50 vs 90/10 " + fixed(two) + " vs " + fixed(skewed) + "%"};
}

// Scaled dynamic city.
constexpr int kGridSide = 12;
constexpr Seconds kEdgeSeconds = 60;
constexpr double kRatePerSecond = 0.15;
constexpr int kSeeds = 5;

SimConfig city(ProtocolKind protocol, std::vector<int> fleets, std::uint64_t seed) {
  SimConfig cfg;
  cfg.warmup = 0;
  cfg.horizon = 7200;
  cfg.protocol = protocol;
  cfg.protocol_cfg.epsilon = 0.01;
  cfg.protocol_cfg.k_coop = 1000;
  cfg.seed = seed;
  const char* names[] = {"large", "medium", "small"};
  for (std::size_t p = 0; p < fleets.size(); ++p) {
    CompanySpec c;
    c.name = names[p];
    c.fleet_size = fleets[p];
    cfg.companies.push_back(c);
  }
  return cfg;
}

double mean_service_rate(ProtocolKind protocol, std::vector<int> fleets, long k_coop, double strict_fraction) {
  const auto net = TravelNetwork::grid(kGridSide, kGridSide, kEdgeSeconds);
  double total = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    SimConfig cfg = city(protocol, fleets, 100 + static_cast<std::uint64_t>(s));
    cfg.protocol_cfg.k_coop = k_coop;
    DemandParams demand;
    demand.rate_per_s = kRatePerSecond;
    demand.duration = cfg.warmup + cfg.horizon;
    demand.preferences.fraction = strict_fraction;
    demand.preferences.never_switch = true;
    demand.preferences.weights = {27, 17, 6};
    const auto requests = generate_demand(demand, net, 3, derive_seed(cfg.seed, 0xDE3A4D));
    Simulator sim(cfg, net);
    total += sim.run(requests).service_rate;
  }
  return total / kSeeds;
}

Verdict dynamic_scenario() {
  const auto start = Clock::now();
  const std::vector<int> fleets{27, 17, 6}, grown{32, 20, 7};
  const double central = mean_service_rate(ProtocolKind::centralized, fleets, 1000, 0.0);
  const double coop1000 = mean_service_rate(ProtocolKind::cooperative, fleets, 1000, 0.0);
  const double coop500 = mean_service_rate(ProtocolKind::cooperative, fleets, 500, 0.0);
  const double coop250 = mean_service_rate(ProtocolKind::cooperative, fleets, 250, 0.0);
  const double comp = mean_service_rate(ProtocolKind::competitive, fleets, 1000, 0.0);
  const double strict = mean_service_rate(ProtocolKind::competitive, fleets, 1000, 0.97);
  const double strict_grown = mean_service_rate(ProtocolKind::competitive, grown, 1000, 0.97);
  const double elapsed = seconds_since(start);

  const bool calibrated = central >= 95.0 && central <= 100.0;
  const bool coop_close = std::abs(coop1000 - central) <= 1.5;
  const bool coop_monotone = coop1000 >= coop500 && coop500 >= coop250;
  const bool comp_close = std::abs(comp - central) <= 1.5;
  const bool strict_drop = comp - strict >= 1.0;
  const bool growth = strict_grown > strict;
  const bool fast = elapsed < 600.0;
  std::string flags;
  auto flag = [&](bool ok, const char* name) {
    if (!ok) flags += std::string(flags.empty() ? "; failed: " : ", ") + name;
  };
  flag(calibrated, "calibration");
  flag(coop_close, "(i)");
  flag(coop_monotone, "(ii)");
  flag(comp_close, "(iii)");
  flag(strict_drop, "(iv)");
  flag(growth, "(v)");
  flag(fast, "runtime");
  return {flags.empty(),
          "SR centralized " + fixed(central, 2) + ", cooperative k=1000/500/250 " + fixed(coop1000, 2) + "/" +
              fixed(coop500, 2) + "/" + fixed(coop250, 2) + ", competitive " + fixed(comp, 2) + ", strict " +
              fixed(strict, 2) + ", strict +20% fleet " + fixed(strict_grown, 2) + ", " + fixed(elapsed, 1) + " s" +
              flags};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "rideshare_acceptance_determinism";
  fs::remove_all(root);
  int identical = 0, runs = 0;
  for (const char* protocol : {"centralized", "cooperative", "competitive"}) {
    const std::string text = std::string(R"({
      "seed": 77,
      "network": {"kind": "grid", "width": 10, "height": 10, "seconds_per_edge": 60},
      "companies": [{"name": "a", "fleet_size": 12, "noise_sigma": 30},
                    {"name": "b", "fleet_size": 8, "bias": 0.1}],
      "demand": {"kind": "synthetic", "rate_per_s": 0.08,
                 "preferences": {"fraction": 0.5, "weights": [1, 1]}},
      "protocol": {"kind": ")") + protocol + R"(", "k_coop": 300},
      "sim": {"warmup_s": 300, "horizon_s": 1800}
    })";
    const auto scenario = parse_scenario(text);
    const fs::path a = root / protocol / "a", b = root / protocol / "b";
    run_scenario(scenario, {a, true});
    run_scenario(scenario, {b, true});
    ++runs;
    if (slurp(a / "report.json") == slurp(b / "report.json") &&
        slurp(a / "metrics.csv") == slurp(b / "metrics.csv") && !slurp(a / "report.json").empty())
      ++identical;
  }
  fs::remove_all(root);
  return {identical == runs, std::to_string(identical) + "/" + std::to_string(runs) +
                                 " scenarios byte-identical in report.json and metrics.csv"};
}

Verdict backend_swap() {
  std::mt19937_64 rng(1008);
  int same = 0, nontrivial = 0;
  for (int t = 0; t < 50; ++t) {
    const int nodes = 40;
    std::uniform_real_distribution<double> coord(0.0, 400.0);
    std::vector<std::pair<double, double>> at(nodes);
    for (auto& p : at) p = {coord(rng), coord(rng)};
    Eigen::Matrix<Seconds, Eigen::Dynamic, Eigen::Dynamic> times(nodes, nodes);
    for (int a = 0; a < nodes; ++a)
      for (int b = 0; b < nodes; ++b)
        times(a, b) = static_cast<Seconds>(
            std::lround(std::hypot(at[a].first - at[b].first, at[a].second - at[b].second)));
    const auto net = TravelNetwork::matrix(times);

    SimConfig cfg;
    cfg.seed = 500 + static_cast<std::uint64_t>(t);
    cfg.protocol = ProtocolKind::centralized;
    cfg.protocol_cfg.epsilon = 0.01;
    const int vehicles = std::uniform_int_distribution<int>(2, 8)(rng);
    const int first = std::uniform_int_distribution<int>(1, vehicles)(rng);
    cfg.companies.push_back({"a", first, 2, 0.0, 0.0});
    if (vehicles > first) cfg.companies.push_back({"b", vehicles - first, 2, 0.0, 0.0});

    // distinct origins, so no two requests share a cost column
    std::vector<NodeId> origins(nodes);
    std::iota(origins.begin(), origins.end(), 0);
    std::shuffle(origins.begin(), origins.end(), rng);
    std::uniform_int_distribution<NodeId> node(0, nodes - 1);
    std::vector<TripRequest> batch(static_cast<std::size_t>(std::uniform_int_distribution<int>(2, 8)(rng)));
    for (std::size_t k = 0; k < batch.size(); ++k) {
      batch[k].id = static_cast<RequestId>(k);
      batch[k].submit_time = 10;
      batch[k].origin = Location{origins[k]};
      do batch[k].destination = Location{node(rng)};
      while (batch[k].destination == batch[k].origin);
    }

    auto served = [&](LapBackend backend) {
      SimConfig c = cfg;
      c.backend = backend;
      Simulator sim(c, net);
      std::set<RequestId> ids;
      for (const auto& d : sim.step(batch).dispatches) ids.insert(d.request);
      return ids;
    };
    const auto auction = served(LapBackend::auction);
    if (auction == served(LapBackend::brute_force)) ++same;
    if (!auction.empty() && auction.size() < batch.size()) ++nontrivial;
  }
  return {same == 50, std::to_string(same) + "/50 batches with identical served sets (" +
                          std::to_string(nontrivial) + " partially served)"};
}

}  // namespace

int main() {
  try {
    report(1, "cooperative exactness", cooperative_exactness());
    report(2, "cooperative n*eps bound", cooperative_within_n_epsilon());
    report(3, "iteration bounds", iteration_bounds());
    report(4, "competitive worst case", competitive_worst_case());
    report(5, "static sweep trends", static_sweep());
    report(6, "dynamic scaled scenario", dynamic_scenario());
    report(7, "determinism", determinism());
    report(8, "oracle backend swap", backend_swap());
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
