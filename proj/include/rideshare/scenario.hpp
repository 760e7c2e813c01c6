#pragma once

#include "rideshare/core.hpp"
#include "rideshare/network.hpp"
#include "rideshare/sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rideshare {

// Unreadable inputs or unwritable outputs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NetworkSpec {
  TravelNetwork::Kind kind = TravelNetwork::Kind::grid;
  int width = 10;
  int height = 10;
  Seconds seconds_per_edge = 60;
  std::filesystem::path path;  // matrix networks only
};

struct PreferenceSpec {
  double fraction = 0.0;
  /// Relative weight of each company as the preferred one. Empty means
  /// equal weight on the first two companies (or the only one).
  std::vector<double> weights;
  /// Threshold sampler base s: thresholds are drawn from {s, s+5, ..., 30, 120} minutes.
  int threshold_base_min = 5;
  bool never_switch = false;
};

struct DemandParams {
  double rate_per_s = 0.05;
  Seconds start = 0;
  Seconds duration = 3600;
  Seconds max_wait = kDefaultMaxWait;
  Seconds max_detour = kDefaultMaxDetour;
  PreferenceSpec preferences;
};

struct DemandSpec {
  bool from_file = false;
  std::filesystem::path path;
  DemandParams synthetic;  // duration defaults to warmup + horizon
};

struct ScenarioFile {
  NetworkSpec network;
  DemandSpec demand;
  SimConfig sim;
};

/// Parses the JSON scenario text. Unknown keys, wrong types and invalid
/// values throw ConfigError; relative paths resolve against `base_dir`.
ScenarioFile parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Parameters of the `gen-demand` subcommand: {"network": ..., "demand": ...}.
struct DemandFile {
  NetworkSpec network;
  DemandParams demand;
  int companies = 2;
};
DemandFile parse_demand_file(const std::string& text, const std::filesystem::path& base_dir = {});
DemandFile load_demand_file(const std::filesystem::path& path);

TravelNetwork build_network(const NetworkSpec& spec);

/// Reads a request CSV; errors name the offending line.
std::vector<TripRequest> load_requests(const std::filesystem::path& path);

/// Poisson arrivals over [start, start + duration), uniform origin and
/// destination nodes, and preferences drawn per `params.preferences` for
/// `companies` companies.
std::vector<TripRequest> generate_demand(const DemandParams& params, const TravelNetwork& net,
                                         int companies, std::uint64_t seed);

/// Requests of a scenario: the demand file, or synthetic demand seeded from
/// the scenario seed.
std::vector<TripRequest> scenario_requests(const ScenarioFile& scenario, const TravelNetwork& net);

/// Deterministic JSON rendering of a report (wall-clock excluded).
std::string report_json(const ScenarioReport& report, const ScenarioFile& scenario);

struct RunOptions {
  std::filesystem::path out_dir;  // empty: write nothing
  bool trace = false;
};

/// Runs warm-up plus horizon and writes report.json, metrics.csv and, with
/// trace, events.jsonl into out_dir.
ScenarioReport run_scenario(const ScenarioFile& scenario, const RunOptions& options = {});

struct SweepCell {
  std::string name;
  ProtocolKind protocol = ProtocolKind::cooperative;
  int size = 10;                     // vehicles = requests
  std::vector<double> shares{100.0};  // fleet split in percent
  double noise_sigma = 0.0;          // minutes
  double bias = 0.0;                 // each company draws its bias from [-bias, bias]
  double preference_fraction = 0.0;
  double threshold_min = kNeverSwitch;
  int instances = 100;
};

struct SweepSpec {
  std::uint64_t seed = 1;
  NetworkSpec network;  // grid only
  ProtocolConfig protocol;
  /// Optimum by enumeration up to this size, by the exact auction beyond.
  int brute_force_max = 8;
  std::vector<SweepCell> cells;
};

SweepSpec parse_sweep(const std::string& text);
SweepSpec load_sweep(const std::filesystem::path& path);

struct SweepInstance {
  CostMatrix true_costs;   // minutes
  CostMatrix perceived;    // after noise and bias
  std::vector<CompanyId> company_of_row;
  std::vector<std::optional<Preference>> preferences;
};

/// Instance `index` of a cell. True costs depend only on (seed, size,
/// index), so every cell of a given size sees the same instances.
SweepInstance make_sweep_instance(const SweepSpec& spec, const SweepCell& cell, int index);

struct CellResult {
  SweepCell cell;
  std::vector<double> gaps;  // percent, one per instance
  double mean_gap = 0.0;
  double max_gap = 0.0;
  double mean_rounds = 0.0;
};

CellResult run_sweep_cell(const SweepSpec& spec, const SweepCell& cell);
std::vector<CellResult> run_static_sweep(const SweepSpec& spec);

inline constexpr const char* kGapCsvHeader =
    "cell,protocol,size,companies,shares,noise_sigma_min,bias,preference_fraction,threshold_min,"
    "instances,mean_gap_pct,max_gap_pct,mean_rounds";
void write_gaps_csv(std::ostream& out, const std::vector<CellResult>& results);

}  // namespace rideshare
