#include "rideshare/sim.hpp"
#include "rideshare/lap.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ostream>

namespace rideshare {

std::string to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::centralized: return "centralized";
    case ProtocolKind::cooperative: return "cooperative";
    case ProtocolKind::competitive: return "competitive";
  }
  return "unknown";
}

ProtocolKind protocol_from_string(const std::string& name) {
  if (name == "centralized") return ProtocolKind::centralized;
  if (name == "cooperative") return ProtocolKind::cooperative;
  if (name == "competitive") return ProtocolKind::competitive;
  throw ConfigError("unknown protocol '" + name + "'");
}

void validate(const SimConfig& cfg) {
  if (cfg.batch_period <= 0) throw ConfigError("batch period must be positive");
  if (cfg.context_k < 1) throw ConfigError("context_k must be at least 1");
  if (cfg.context_radius < 0 || cfg.rebalance_radius < 0) throw ConfigError("radii must be nonnegative");
  if (cfg.rebalance_wait < 0 || cfg.rebalance_detour < 0)
    throw ConfigError("rebalance limits must be nonnegative");
  if (cfg.warmup < 0 || cfg.horizon <= 0) throw ConfigError("warmup >= 0 and horizon > 0 required");
  if (cfg.companies.empty()) throw ConfigError("at least one company is required");
  for (const auto& c : cfg.companies) {
    if (c.fleet_size < 1) throw ConfigError("company '" + c.name + "' needs at least one vehicle");
    if (c.capacity < 1) throw ConfigError("company '" + c.name + "' needs a positive capacity");
    if (!(c.bias_fraction > -1.0)) throw ConfigError("company '" + c.name + "' bias must exceed -1");
    if (!(c.noise_sigma >= 0.0)) throw ConfigError("company '" + c.name + "' noise must be >= 0");
  }
  validate(cfg.protocol_cfg);
}

FleetState make_fleet(const std::vector<CompanySpec>& companies, const TravelNetwork& net,
                      std::mt19937_64& rng) {
  FleetState state;
  std::uniform_int_distribution<NodeId> node(0, net.node_count() - 1);
  for (std::size_t p = 0; p < companies.size(); ++p) {
    Company company;
    company.id = static_cast<CompanyId>(p);
    company.bias_fraction = companies[p].bias_fraction;
    company.noise_sigma = companies[p].noise_sigma;
    for (int k = 0; k < companies[p].fleet_size; ++k) {
      Vehicle v;
      v.id = static_cast<VehicleId>(state.vehicles.size());
      v.company = company.id;
      v.capacity = companies[p].capacity;
      v.location = Location{node(rng)};
      company.fleet.push_back(v.id);
      state.vehicles.push_back(std::move(v));
    }
    state.companies.push_back(std::move(company));
  }
  state.occupancy_sum.assign(companies.size(), 0.0);
  return state;
}

std::vector<VehicleId> context_map(const TripRequest& request, const FleetState& state, int k,
                                   const TravelNetwork& net, Seconds radius,
                                   const std::function<bool(const Vehicle&)>& eligible) {
  std::vector<std::pair<Seconds, VehicleId>> reach;
  for (const auto& v : state.vehicles) {
    if (!eligible(v)) continue;
    const Seconds t = std::max<Seconds>(0, v.position_time - state.clock) + net.travel_time(v.location, request.origin);
    if (t <= radius) reach.emplace_back(t, v.id);
  }
  const auto keep = std::min<std::size_t>(reach.size(), static_cast<std::size_t>(std::max(k, 0)));
  std::partial_sort(reach.begin(), reach.begin() + static_cast<std::ptrdiff_t>(keep), reach.end());
  std::vector<VehicleId> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(reach[i].second);
  return out;
}

const std::optional<Insertion>& BatchCosts::insertion(Index row, Index col) const {
  static const std::optional<Insertion> none;
  if (row >= unpadded_rows || col >= unpadded_cols) return none;
  return insertions[static_cast<std::size_t>(row * unpadded_cols + col)];
}

BatchCosts build_cost_matrix(const std::vector<TripRequest>& batch,
                             const std::vector<std::vector<VehicleId>>& candidates,
                             const FleetState& state, const TravelNetwork& net, Seconds now,
                             CostPerturbation& perturbation) {
  BatchCosts bc;
  for (const auto& list : candidates) bc.row_vehicle.insert(bc.row_vehicle.end(), list.begin(), list.end());
  std::sort(bc.row_vehicle.begin(), bc.row_vehicle.end());
  bc.row_vehicle.erase(std::unique(bc.row_vehicle.begin(), bc.row_vehicle.end()), bc.row_vehicle.end());
  for (const auto& r : batch) bc.col_request.push_back(r.id);

  const Index rows = static_cast<Index>(bc.row_vehicle.size());
  const Index cols = static_cast<Index>(batch.size());
  bc.unpadded_rows = rows;
  bc.unpadded_cols = cols;
  bc.insertions.assign(static_cast<std::size_t>(rows * cols), std::nullopt);
  CostMatrix raw = CostMatrix::Constant(rows, cols, kSentinel);
  CostMatrix perturbed = raw;

  std::vector<std::vector<bool>> is_candidate(static_cast<std::size_t>(cols),
                                              std::vector<bool>(static_cast<std::size_t>(rows), false));
  for (Index j = 0; j < cols; ++j)
    for (VehicleId v : candidates[static_cast<std::size_t>(j)]) {
      const auto it = std::lower_bound(bc.row_vehicle.begin(), bc.row_vehicle.end(), v);
      is_candidate[static_cast<std::size_t>(j)][static_cast<std::size_t>(it - bc.row_vehicle.begin())] = true;
    }

  for (Index i = 0; i < rows; ++i) {
    const Vehicle& v = state.vehicles[static_cast<std::size_t>(bc.row_vehicle[static_cast<std::size_t>(i)])];
    const Company& company = state.companies[static_cast<std::size_t>(v.company)];
    auto& rng = perturbation.company_rng[static_cast<std::size_t>(v.company)];
    bc.row_company.push_back(v.company);
    for (Index j = 0; j < cols; ++j) {
      if (!is_candidate[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) continue;
      auto ins = insert_request(v, batch[static_cast<std::size_t>(j)], net, now, state.promises);
      if (!ins) continue;
      raw(i, j) = static_cast<double>(ins->cost);
      perturbed(i, j) = apply_bias(apply_noise(raw(i, j), company.noise_sigma, rng), company.bias_fraction);
      bc.insertions[static_cast<std::size_t>(i * cols + j)] = std::move(ins);
    }
  }
  bc.costs = pad_to_square(perturbed);
  bc.true_costs = pad_to_square(raw);
  const Index n = bc.costs.rows();
  const CompanyId pad_owner = bc.row_company.empty() ? 0 : bc.row_company.front();
  bc.row_vehicle.resize(static_cast<std::size_t>(n), -1);
  bc.row_company.resize(static_cast<std::size_t>(n), pad_owner);
  bc.col_request.resize(static_cast<std::size_t>(n), -1);
  return bc;
}

void advance_fleet(FleetState& state, const TravelNetwork& net, Seconds until) {
  for (auto& v : state.vehicles) {
    while (true) {
      if (v.route.empty()) {
        v.position_time = std::max(v.position_time, until);
        break;
      }
      const Stop stop = v.route.stops.front();
      if (v.location == stop.location) {
        if (v.position_time > until) break;
        const Seconds t = v.position_time;
        if (stop.kind == StopKind::pickup) {
          v.onboard.push_back({stop.request, t});
        } else {
          auto it = std::find_if(v.onboard.begin(), v.onboard.end(),
                                 [&](const Passenger& p) { return p.request == stop.request; });
          if (it == v.onboard.end()) throw StructuralError("dropoff of a passenger not on board");
          const TripRequest& req = state.promises.at(stop.request);
          ServedRecord rec;
          rec.request = stop.request;
          rec.company = v.company;
          rec.vehicle = v.id;
          rec.submit = req.submit_time;
          rec.pickup = it->pickup_time;
          rec.dropoff = t;
          rec.direct = net.travel_time(req.origin, req.destination);
          state.served.push_back(rec);
          state.pending.erase(stop.request);
          v.onboard.erase(it);
        }
        v.route.stops.erase(v.route.stops.begin());
        continue;
      }
      if (v.position_time >= until) break;
      const Location hop = net.next_hop(v.location, stop.location);
      v.position_time += net.travel_time(v.location, hop);
      v.location = hop;
    }
  }
}

ScenarioReport compute_metrics(const FleetState& state, const std::vector<CompanySpec>& companies,
                               Seconds warmup, Seconds horizon) {
  auto measured = [&](Seconds submit) { return submit >= warmup && submit < warmup + horizon; };
  const std::size_t P = companies.size();
  ScenarioReport rep;

  std::vector<long> served_by(P, 0);
  std::vector<double> wait_by(P, 0.0), detour_by(P, 0.0);
  double wait_all = 0.0, detour_all = 0.0;
  for (const auto& s : state.served) {
    if (!measured(s.submit)) continue;
    const auto p = static_cast<std::size_t>(s.company);
    const double wait = static_cast<double>(s.pickup - s.submit) / 60.0;
    const double detour = static_cast<double>((s.dropoff - s.pickup) - s.direct) / 60.0;
    ++served_by[p];
    wait_by[p] += wait;
    detour_by[p] += detour;
    wait_all += wait;
    detour_all += detour;
    ++rep.served;
  }
  long unserved = 0;
  for (const auto& u : state.unserved)
    if (measured(u.submit)) ++unserved;
  long pending = 0;
  for (const auto& [id, veh] : state.pending) {
    (void)veh;
    if (measured(state.promises.at(id).submit_time)) ++pending;
  }
  rep.total_requests = rep.served + unserved + pending;
  const double total = static_cast<double>(rep.total_requests);
  rep.service_rate = total > 0 ? 100.0 * static_cast<double>(rep.served) / total : 0.0;
  if (rep.served > 0) {
    rep.mean_wait_min = wait_all / static_cast<double>(rep.served);
    rep.mean_detour_min = detour_all / static_cast<double>(rep.served);
  }

  int fleet_total = 0;
  for (const auto& c : companies) fleet_total += c.fleet_size;
  for (std::size_t p = 0; p < P; ++p) {
    CompanyReport c;
    c.name = companies[p].name;
    c.fleet_size = companies[p].fleet_size;
    c.fleet_share = 100.0 * c.fleet_size / fleet_total;
    c.served_share = total > 0 ? 100.0 * static_cast<double>(served_by[p]) / total : 0.0;
    c.egalitarian_gap = c.served_share - c.fleet_share / 100.0 * rep.service_rate;
    if (served_by[p] > 0) {
      c.mean_wait_min = wait_by[p] / static_cast<double>(served_by[p]);
      c.mean_detour_min = detour_by[p] / static_cast<double>(served_by[p]);
    }
    if (state.occupancy_samples > 0 && p < state.occupancy_sum.size())
      c.mean_occupancy = state.occupancy_sum[p] / static_cast<double>(state.occupancy_samples);
    rep.companies.push_back(std::move(c));
  }
  return rep;
}

Simulator::Simulator(SimConfig cfg, TravelNetwork net) : cfg_(std::move(cfg)), net_(std::move(net)) {
  validate(cfg_);
  std::mt19937_64 fleet_rng(derive_seed(cfg_.seed, 0xF1EE7));
  state_ = make_fleet(cfg_.companies, net_, fleet_rng);
  state_.clock = cfg_.batch_period;
  for (std::size_t p = 0; p < cfg_.companies.size(); ++p)
    perturbation_.company_rng.emplace_back(derive_seed(cfg_.seed, 0xC0, p));
}

Simulator::Simulator(SimConfig cfg, TravelNetwork net, FleetState initial)
    : cfg_(std::move(cfg)), net_(std::move(net)), state_(std::move(initial)) {
  validate(cfg_);
  state_.occupancy_sum.resize(state_.companies.size(), 0.0);
  for (std::size_t p = 0; p < state_.companies.size(); ++p)
    perturbation_.company_rng.emplace_back(derive_seed(cfg_.seed, 0xC0, p));
}

namespace {

nlohmann::json trace_to_json(const ProtocolTrace& trace, const BatchCosts& bc) {
  nlohmann::json rounds = nlohmann::json::array();
  auto veh = [&](Index i) { return bc.row_vehicle[static_cast<std::size_t>(i)]; };
  auto req = [&](Index j) { return bc.col_request[static_cast<std::size_t>(j)]; };
  for (const auto& r : trace) {
    nlohmann::json jr;
    jr["round"] = r.round;
    jr["bids"] = nlohmann::json::array();
    for (const auto& b : r.bids) jr["bids"].push_back({veh(b.vehicle), req(b.request), b.increment});
    jr["offers"] = nlohmann::json::array();
    for (const auto& o : r.offers) jr["offers"].push_back({o.company, veh(o.vehicle), req(o.request), o.cost});
    jr["awards"] = nlohmann::json::array();
    for (const auto& a : r.awards) jr["awards"].push_back({req(a.request), veh(a.vehicle), a.price});
    rounds.push_back(std::move(jr));
  }
  return rounds;
}

}  // namespace

Simulator::PhaseResult Simulator::assign_batch(const std::vector<TripRequest>& batch) {
  return assign_phase(batch, false);
}

Simulator::PhaseResult Simulator::rebalance(const std::vector<TripRequest>& unserved) {
  return assign_phase(unserved, true);
}

Simulator::PhaseResult Simulator::assign_phase(const std::vector<TripRequest>& input, bool relaxed) {
  PhaseResult out;
  if (input.empty()) return out;
  const Seconds now = state_.clock;

  std::vector<TripRequest> batch = input;
  if (relaxed)
    for (auto& r : batch) {
      r.max_wait = cfg_.rebalance_wait;
      r.max_detour = cfg_.rebalance_detour;
    }
  const Seconds radius = relaxed ? cfg_.rebalance_radius : cfg_.context_radius;

  std::vector<std::vector<VehicleId>> candidates(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j)
    for (const auto& company : state_.companies) {
      auto ids = context_map(batch[j], state_, cfg_.context_k, net_, radius, [&](const Vehicle& v) {
        return v.company == company.id && (!relaxed || v.idle());
      });
      candidates[j].insert(candidates[j].end(), ids.begin(), ids.end());
    }

  const BatchCosts bc = build_cost_matrix(batch, candidates, state_, net_, now, perturbation_);

  ProtocolConfig pcfg = cfg_.protocol_cfg;
  if (pcfg.broker_seed) pcfg.broker_seed = derive_seed(*pcfg.broker_seed, cfg_.seed, batch_index_, relaxed ? 1 : 0);
  ProtocolTrace trace;
  ProtocolTrace* trace_ptr = events_ ? &trace : nullptr;
  ProtocolResult result;
  switch (cfg_.protocol) {
    case ProtocolKind::centralized:
      result = run_centralized(bc.costs, pcfg, cfg_.backend);
      break;
    case ProtocolKind::cooperative:
      result = run_cooperative(bc.costs, bc.row_company, pcfg, trace_ptr);
      break;
    case ProtocolKind::competitive: {
      std::vector<std::optional<Preference>> prefs(bc.col_request.size());
      for (std::size_t j = 0; j < batch.size(); ++j) prefs[j] = batch[j].preference;
      result = run_competitive(bc.costs, bc.row_company, prefs, pcfg, trace_ptr);
      break;
    }
  }
  out.rounds = result.rounds;
  out.exhausted = result.exhausted;

  std::vector<bool> served(batch.size(), false);
  for (auto [i, j] : result.assignment.pairs) {
    const auto& ins = bc.insertion(i, j);
    if (!ins) continue;  // only padding can land here, and padding is sentinel
    const TripRequest& req = batch[static_cast<std::size_t>(j)];
    Vehicle& v = state_.vehicles[static_cast<std::size_t>(bc.row_vehicle[static_cast<std::size_t>(i)])];
    v.route = ins->route;
    v.position_time = route_start_time(v, state_.clock);
    state_.promises.insert(req);
    state_.pending[req.id] = v.id;
    served[static_cast<std::size_t>(j)] = true;
    out.dispatches.push_back({req.id, v.id, bc.true_costs(i, j), relaxed});
  }
  for (std::size_t j = 0; j < batch.size(); ++j)
    if (!served[j]) out.leftover.push_back(input[j]);

  if (events_) {
    nlohmann::json ev;
    ev["time"] = now;
    ev["phase"] = relaxed ? "rebalance" : "main";
    ev["requests"] = bc.unpadded_cols;
    ev["candidates"] = bc.unpadded_rows;
    ev["rounds"] = result.rounds;
    ev["exhausted"] = result.exhausted;
    ev["trace"] = trace_to_json(trace, bc);
    ev["dispatches"] = nlohmann::json::array();
    for (const auto& d : out.dispatches) ev["dispatches"].push_back({d.request, d.vehicle, d.cost});
    *events_ << ev.dump() << '\n';
  }
  return out;
}

void Simulator::sample_occupancy() {
  const Seconds end = cfg_.warmup + cfg_.horizon;
  if (state_.clock < cfg_.warmup || state_.clock > end) return;
  for (const auto& c : state_.companies) {
    double onboard = 0.0;
    for (VehicleId id : c.fleet) onboard += static_cast<double>(state_.vehicles[static_cast<std::size_t>(id)].onboard.size());
    state_.occupancy_sum[static_cast<std::size_t>(c.id)] += c.fleet.empty() ? 0.0 : onboard / static_cast<double>(c.fleet.size());
  }
  ++state_.occupancy_samples;
}

BatchOutcome Simulator::step(const std::vector<TripRequest>& batch) {
  const auto wall_start = std::chrono::steady_clock::now();
  BatchOutcome outcome;
  outcome.time = state_.clock;
  outcome.submitted = static_cast<int>(batch.size());
  state_.submitted += static_cast<long>(batch.size());

  PhaseResult main = assign_phase(batch, false);
  PhaseResult extra = assign_phase(main.leftover, true);

  outcome.assigned = static_cast<int>(main.dispatches.size());
  outcome.rebalanced = static_cast<int>(extra.dispatches.size());
  outcome.dropped = static_cast<int>(extra.leftover.size());
  outcome.rounds = main.rounds;
  outcome.rebalance_rounds = extra.rounds;
  outcome.exhausted = main.exhausted || extra.exhausted;
  outcome.dispatches = std::move(main.dispatches);
  outcome.dispatches.insert(outcome.dispatches.end(), extra.dispatches.begin(), extra.dispatches.end());
  for (const auto& r : extra.leftover) state_.unserved.push_back({r.id, r.submit_time});

  advance_fleet(state_, net_, state_.clock + cfg_.batch_period);
  state_.clock += cfg_.batch_period;
  sample_occupancy();
  ++batch_index_;

  wall_ms_total_ += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start).count();
  history_.push_back(outcome);
  return outcome;
}

ScenarioReport Simulator::run(const std::vector<TripRequest>& requests) {
  std::vector<TripRequest> sorted = requests;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TripRequest& a, const TripRequest& b) { return a.submit_time < b.submit_time; });
  const Seconds end = cfg_.warmup + cfg_.horizon;
  std::size_t next = 0;
  while (next < sorted.size() && sorted[next].submit_time < state_.clock - cfg_.batch_period) ++next;

  while (state_.clock - cfg_.batch_period < end) {
    std::vector<TripRequest> batch;
    while (next < sorted.size() && sorted[next].submit_time < state_.clock &&
           sorted[next].submit_time < end)
      batch.push_back(sorted[next++]);
    step(batch);
  }
  // Drain: finish every dispatched trip so waiting and detour are known.
  for (int guard = 0; !state_.pending.empty() && guard < 100000; ++guard) {
    advance_fleet(state_, net_, state_.clock + cfg_.batch_period);
    state_.clock += cfg_.batch_period;
  }

  ScenarioReport rep = compute_metrics(state_, cfg_.companies, cfg_.warmup, cfg_.horizon);
  long rounds = 0, batches = 0;
  for (const auto& h : history_)
    if (h.submitted > 0 && h.time > cfg_.warmup) {
      rounds += h.rounds;
      ++batches;
    }
  rep.mean_rounds = batches > 0 ? static_cast<double>(rounds) / static_cast<double>(batches) : 0.0;
  rep.mean_batch_wall_ms = history_.empty() ? 0.0 : wall_ms_total_ / static_cast<double>(history_.size());
  return rep;
}

void Simulator::write_metrics_csv(std::ostream& out) const {
  out << "time_s,submitted,assigned,rebalanced,dropped,rounds,rebalance_rounds,exhausted\n";
  for (const auto& h : history_)
    out << h.time << ',' << h.submitted << ',' << h.assigned << ',' << h.rebalanced << ',' << h.dropped << ','
        << h.rounds << ',' << h.rebalance_rounds << ',' << (h.exhausted ? 1 : 0) << '\n';
}

}  // namespace rideshare
