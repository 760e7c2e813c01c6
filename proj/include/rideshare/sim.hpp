#pragma once

#include "rideshare/core.hpp"
#include "rideshare/darp.hpp"
#include "rideshare/network.hpp"
#include "rideshare/protocols.hpp"

#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace rideshare {

enum class ProtocolKind { centralized, cooperative, competitive };

std::string to_string(ProtocolKind kind);
ProtocolKind protocol_from_string(const std::string& name);

struct CompanySpec {
  std::string name;
  int fleet_size = 1;
  int capacity = kDefaultCapacity;
  double bias_fraction = 0.0;
  double noise_sigma = 0.0;
};

struct SimConfig {
  Seconds batch_period = 10;
  int context_k = 10;
  /// Candidate vehicles must reach the pickup within this many seconds.
  Seconds context_radius = 600;
  Seconds rebalance_wait = 1800;
  Seconds rebalance_detour = 1800;
  Seconds rebalance_radius = 1800;
  Seconds warmup = 0;
  /// Measured time span after the warm-up.
  Seconds horizon = 3600;
  std::vector<CompanySpec> companies;
  ProtocolKind protocol = ProtocolKind::centralized;
  ProtocolConfig protocol_cfg;
  LapBackend backend = LapBackend::auction;
  std::uint64_t seed = 1;
};

/// Throws ConfigError on invalid values.
void validate(const SimConfig& cfg);

struct ServedRecord {
  RequestId request = 0;
  CompanyId company = 0;
  VehicleId vehicle = 0;
  Seconds submit = 0;
  Seconds pickup = 0;
  Seconds dropoff = 0;
  Seconds direct = 0;
};

struct UnservedRecord {
  RequestId request = 0;
  Seconds submit = 0;
};

struct FleetState {
  Seconds clock = 0;
  std::vector<Company> companies;
  std::vector<Vehicle> vehicles;  // indexed by VehicleId
  /// Promises of every dispatched request (relaxed limits after rebalancing).
  RequestTable promises;
  std::unordered_map<RequestId, VehicleId> pending;
  std::vector<ServedRecord> served;
  std::vector<UnservedRecord> unserved;
  // Occupancy time-average accumulators over the measured window.
  std::vector<double> occupancy_sum;
  long occupancy_samples = 0;
  long submitted = 0;
};

/// Places each company's fleet uniformly at random over the network.
FleetState make_fleet(const std::vector<CompanySpec>& companies, const TravelNetwork& net,
                      std::mt19937_64& rng);

/// Up to k vehicles accepted by `eligible`, nearest first by the time they
/// need to reach the pickup, within `radius`; ties go to the lower id.
std::vector<VehicleId> context_map(const TripRequest& request, const FleetState& state, int k,
                                   const TravelNetwork& net, Seconds radius,
                                   const std::function<bool(const Vehicle&)>& eligible);

/// Per-batch assignment problem with its row/column bookkeeping. Rows are
/// candidate vehicles in ascending id order, columns the batch requests;
/// padding rows/columns carry id -1.
struct BatchCosts {
  CostMatrix costs;
  CostMatrix true_costs;
  std::vector<VehicleId> row_vehicle;
  std::vector<CompanyId> row_company;
  std::vector<RequestId> col_request;
  std::vector<std::optional<Insertion>> insertions;  // row-major, unpadded shape

  const std::optional<Insertion>& insertion(Index row, Index col) const;
  Index unpadded_rows = 0;
  Index unpadded_cols = 0;
};

/// Noise and bias generators of every company; one stream per company.
struct CostPerturbation {
  std::vector<std::mt19937_64> company_rng;
};

/// Entry (i, j) is bias(noise(insertion cost)) for candidate pairs, the
/// sentinel otherwise; the result is padded square.
BatchCosts build_cost_matrix(const std::vector<TripRequest>& batch,
                             const std::vector<std::vector<VehicleId>>& candidates,
                             const FleetState& state, const TravelNetwork& net, Seconds now,
                             CostPerturbation& perturbation);

struct Dispatch {
  RequestId request = 0;
  VehicleId vehicle = 0;
  double cost = 0.0;
  bool rebalance = false;
};

struct BatchOutcome {
  Seconds time = 0;
  int submitted = 0;
  int assigned = 0;
  int rebalanced = 0;
  int dropped = 0;
  long rounds = 0;
  long rebalance_rounds = 0;
  bool exhausted = false;
  std::vector<Dispatch> dispatches;
};

struct CompanyReport {
  std::string name;
  int fleet_size = 0;
  double fleet_share = 0.0;        // percent
  double served_share = 0.0;       // percent of all measured requests
  double egalitarian_gap = 0.0;    // percentage points
  double mean_wait_min = 0.0;
  double mean_detour_min = 0.0;
  double mean_occupancy = 0.0;     // customers per vehicle
};

struct ScenarioReport {
  long total_requests = 0;
  long served = 0;
  double service_rate = 0.0;  // percent
  double mean_wait_min = 0.0;
  double mean_detour_min = 0.0;
  double mean_rounds = 0.0;
  std::vector<CompanyReport> companies;
  double mean_batch_wall_ms = 0.0;  // not part of the deterministic report
};

/// Aggregates served/unserved logs for requests submitted in
/// [warmup, warmup + horizon).
ScenarioReport compute_metrics(const FleetState& state, const std::vector<CompanySpec>& companies,
                               Seconds warmup, Seconds horizon);

/// Moves vehicles along their routes until `until`, serving stops on the way.
void advance_fleet(FleetState& state, const TravelNetwork& net, Seconds until);

/// The batch loop. Owns the fleet, the per-actor random streams, and the
/// optional JSON-lines event sink.
class Simulator {
 public:
  Simulator(SimConfig cfg, TravelNetwork net);
  Simulator(SimConfig cfg, TravelNetwork net, FleetState initial);

  /// Assigns `batch` at the current clock (main phase, then rebalancing of
  /// the leftovers on idle vehicles), drops what is still unassigned, then
  /// advances the fleet by one batch period.
  BatchOutcome step(const std::vector<TripRequest>& batch);

  struct PhaseResult {
    std::vector<Dispatch> dispatches;
    std::vector<TripRequest> leftover;
    long rounds = 0;
    bool exhausted = false;
  };

  /// Main assignment of a batch at the current clock: context mapping, cost
  /// matrix, protocol, dispatch of the winning routes.
  PhaseResult assign_batch(const std::vector<TripRequest>& batch);

  /// Second pass over unserved requests with relaxed wait/detour limits, a
  /// wider context radius, and only idle vehicles.
  PhaseResult rebalance(const std::vector<TripRequest>& unserved);

  /// Runs every batch from the current clock through warmup + horizon, then
  /// drains the remaining routes and returns the report.
  ScenarioReport run(const std::vector<TripRequest>& requests);

  const FleetState& state() const { return state_; }
  FleetState& state() { return state_; }
  const SimConfig& config() const { return cfg_; }
  const TravelNetwork& network() const { return net_; }
  const std::vector<BatchOutcome>& history() const { return history_; }

  void set_event_sink(std::ostream* events) { events_ = events; }

  /// Writes one CSV row per processed batch.
  void write_metrics_csv(std::ostream& out) const;

 private:
  PhaseResult assign_phase(const std::vector<TripRequest>& batch, bool rebalance);
  void sample_occupancy();

  SimConfig cfg_;
  TravelNetwork net_;
  FleetState state_;
  CostPerturbation perturbation_;
  std::vector<BatchOutcome> history_;
  std::ostream* events_ = nullptr;
  long batch_index_ = 0;
  double wall_ms_total_ = 0.0;
};

}  // namespace rideshare
