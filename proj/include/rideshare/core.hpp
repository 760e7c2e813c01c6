#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rideshare {

using Seconds = std::int64_t;
using RequestId = std::int64_t;
using VehicleId = std::int32_t;
using CompanyId = std::int32_t;
using NodeId = std::int32_t;

/// Cost of an infeasible vehicle/request pair. Strictly dominates every
/// feasible cost while keeping integer arithmetic exact in a double.
inline constexpr double kSentinel = 1e9;

/// Switching threshold meaning "never switch away from the preferred company".
inline constexpr double kNeverSwitch = std::numeric_limits<double>::infinity();

inline constexpr Seconds kDefaultMaxWait = 420;
inline constexpr Seconds kDefaultMaxDetour = 420;
inline constexpr int kDefaultCapacity = 4;

template <typename Scalar>
using CostMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using CostMatrix = CostMatrixX<double>;
using Index = Eigen::Index;

inline bool is_sentinel(double cost) { return cost >= kSentinel; }

// Broken input: unknown ids, malformed routes, out-of-range locations.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bad scenario/sweep configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed data files (request streams, matrix networks).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Location {
  NodeId node = 0;
  friend bool operator==(const Location&, const Location&) = default;
};

struct Preference {
  CompanyId company = 0;
  /// Seconds of advantage a rival must offer before the customer switches.
  /// 0 always takes the cheapest offer, kNeverSwitch is a strict preference.
  double switching_threshold = kNeverSwitch;
  bool strict() const { return switching_threshold == kNeverSwitch; }
  friend bool operator==(const Preference&, const Preference&) = default;
};

struct TripRequest {
  RequestId id = 0;
  Seconds submit_time = 0;
  Location origin;
  Location destination;
  Seconds max_wait = kDefaultMaxWait;
  Seconds max_detour = kDefaultMaxDetour;
  std::optional<Preference> preference;

  friend bool operator==(const TripRequest&, const TripRequest&) = default;
};

/// Throws StructuralError if the request breaks its own invariants.
void check_request(const TripRequest& request);

enum class StopKind { pickup, dropoff };

struct Stop {
  RequestId request = 0;
  StopKind kind = StopKind::pickup;
  Location location;
  Seconds scheduled_time = 0;
  friend bool operator==(const Stop&, const Stop&) = default;
};

struct Route {
  std::vector<Stop> stops;
  bool empty() const { return stops.empty(); }
  friend bool operator==(const Route&, const Route&) = default;
};

struct Passenger {
  RequestId request = 0;
  Seconds pickup_time = 0;
  friend bool operator==(const Passenger&, const Passenger&) = default;
};

struct Vehicle {
  VehicleId id = 0;
  CompanyId company = 0;
  int capacity = kDefaultCapacity;
  /// Node the vehicle is at, or is committed to reach, at position_time.
  Location location;
  Seconds position_time = 0;
  Route route;
  std::vector<Passenger> onboard;

  /// No passengers and nothing scheduled.
  bool idle() const { return onboard.empty() && route.empty(); }
};

struct Company {
  CompanyId id = 0;
  std::vector<VehicleId> fleet;
  double bias_fraction = 0.0;
  double noise_sigma = 0.0;
};

/// Lookup of the requests a route may reference.
class RequestTable {
 public:
  RequestTable() = default;
  explicit RequestTable(const std::vector<TripRequest>& requests);

  void insert(const TripRequest& request);
  const TripRequest& at(RequestId id) const;
  bool contains(RequestId id) const { return table_.contains(id); }
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<RequestId, TripRequest> table_;
};

class TravelNetwork;

enum class ViolationKind { ordering, capacity, wait, detour, time_order };

struct Violation {
  ViolationKind kind;
  RequestId request = -1;
  std::string detail;
};

std::string to_string(ViolationKind kind);

/// Checks pickup-before-dropoff, capacity, nondecreasing times and each
/// request's wait/detour promise against the stored schedule.
/// Unknown request ids throw StructuralError.
std::vector<Violation> validate_route(const Route& route, const Vehicle& vehicle,
                                      const RequestTable& requests,
                                      const TravelNetwork& net);

/// Solution of one assignment problem in row/column index space.
/// Pairs whose cost is the sentinel are never reported.
struct Assignment {
  std::vector<std::pair<Index, Index>> pairs;  // (row, col)
  double objective = 0.0;
  std::vector<Index> unassigned_cols;
};

/// Builds an Assignment from a full row->col map (-1 for none), dropping
/// sentinel pairs and recomputing the objective from the matrix.
Assignment make_assignment(const CostMatrix& costs, const std::vector<Index>& col_of_row);

/// Sum of costs of the given pairs, read from the matrix.
double assignment_cost(const CostMatrix& costs, const std::vector<std::pair<Index, Index>>& pairs);

// Request stream CSV.
inline constexpr const char* kRequestCsvHeader =
    "id,submit_time_s,origin,destination,max_wait_s,max_detour_s,preference,switching_threshold_s";

void write_requests_csv(std::ostream& out, const std::vector<TripRequest>& requests);
/// Parses and validates rows; results are sorted by submit time (stable on id).
std::vector<TripRequest> read_requests_csv(std::istream& in);

/// Shortest round-trip decimal rendering used by every CSV/JSON writer.
std::string format_number(double value);

}  // namespace rideshare
