#include "rideshare/core.hpp"
#include "rideshare/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace rideshare {

void check_request(const TripRequest& r) {
  if (r.origin == r.destination)
    throw StructuralError("request " + std::to_string(r.id) + ": origin equals destination");
  if (r.max_wait < 0 || r.max_detour < 0)
    throw StructuralError("request " + std::to_string(r.id) + ": negative wait/detour limit");
  if (r.preference) {
    if (r.preference->company < 0)
      throw StructuralError("request " + std::to_string(r.id) + ": negative company id");
    if (!(r.preference->switching_threshold >= 0))
      throw StructuralError("request " + std::to_string(r.id) + ": negative switching threshold");
  }
}

RequestTable::RequestTable(const std::vector<TripRequest>& requests) {
  for (const auto& r : requests) insert(r);
}

void RequestTable::insert(const TripRequest& request) { table_[request.id] = request; }

const TripRequest& RequestTable::at(RequestId id) const {
  auto it = table_.find(id);
  if (it == table_.end()) throw StructuralError("unknown request id " + std::to_string(id));
  return it->second;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::ordering: return "ordering";
    case ViolationKind::capacity: return "capacity";
    case ViolationKind::wait: return "wait";
    case ViolationKind::detour: return "detour";
    case ViolationKind::time_order: return "time_order";
  }
  return "unknown";
}

std::vector<Violation> validate_route(const Route& route, const Vehicle& vehicle,
                                      const RequestTable& requests, const TravelNetwork& net) {
  std::vector<Violation> out;
  std::unordered_map<RequestId, Seconds> picked;  // request -> pickup time
  std::unordered_set<RequestId> dropped;
  for (const auto& p : vehicle.onboard) picked[p.request] = p.pickup_time;

  int load = static_cast<int>(vehicle.onboard.size());
  if (load > vehicle.capacity)
    out.push_back({ViolationKind::capacity, -1, "onboard count exceeds capacity"});

  Seconds last_time = std::numeric_limits<Seconds>::min();
  for (const auto& stop : route.stops) {
    const TripRequest& req = requests.at(stop.request);
    if (!net.valid(stop.location)) throw StructuralError("stop location outside network");
    if (stop.scheduled_time < last_time)
      out.push_back({ViolationKind::time_order, stop.request, "scheduled times decrease"});
    last_time = stop.scheduled_time;

    if (stop.kind == StopKind::pickup) {
      if (picked.contains(stop.request) || dropped.contains(stop.request)) {
        out.push_back({ViolationKind::ordering, stop.request, "duplicate pickup"});
        continue;
      }
      picked[stop.request] = stop.scheduled_time;
      if (stop.scheduled_time - req.submit_time > req.max_wait)
        out.push_back({ViolationKind::wait, stop.request, "pickup later than max wait"});
      if (++load > vehicle.capacity)
        out.push_back({ViolationKind::capacity, stop.request, "occupancy exceeds capacity"});
    } else {
      auto it = picked.find(stop.request);
      if (it == picked.end()) {
        out.push_back({ViolationKind::ordering, stop.request, "dropoff before pickup"});
        continue;
      }
      const Seconds ride = stop.scheduled_time - it->second;
      if (ride > net.travel_time(req.origin, req.destination) + req.max_detour)
        out.push_back({ViolationKind::detour, stop.request, "in-vehicle time exceeds detour"});
      picked.erase(it);
      dropped.insert(stop.request);
      --load;
    }
  }
  for (const auto& [id, t] : picked) {
    (void)t;
    out.push_back({ViolationKind::ordering, id, "pickup without dropoff"});
  }
  return out;
}

double assignment_cost(const CostMatrix& costs, const std::vector<std::pair<Index, Index>>& pairs) {
  double total = 0.0;
  for (auto [i, j] : pairs) total += costs(i, j);
  return total;
}

Assignment make_assignment(const CostMatrix& costs, const std::vector<Index>& col_of_row) {
  Assignment a;
  std::vector<bool> taken(static_cast<std::size_t>(costs.cols()), false);
  for (Index i = 0; i < static_cast<Index>(col_of_row.size()); ++i) {
    const Index j = col_of_row[static_cast<std::size_t>(i)];
    if (j < 0 || is_sentinel(costs(i, j))) continue;
    a.pairs.emplace_back(i, j);
    taken[static_cast<std::size_t>(j)] = true;
  }
  for (Index j = 0; j < costs.cols(); ++j)
    if (!taken[static_cast<std::size_t>(j)]) a.unassigned_cols.push_back(j);
  a.objective = assignment_cost(costs, a.pairs);
  return a;
}

std::string format_number(double value) {
  if (value == kNeverSwitch) return "inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

void write_requests_csv(std::ostream& out, const std::vector<TripRequest>& requests) {
  out << kRequestCsvHeader << '\n';
  for (const auto& r : requests) {
    out << r.id << ',' << r.submit_time << ',' << r.origin.node << ',' << r.destination.node << ','
        << r.max_wait << ',' << r.max_detour << ',';
    if (r.preference)
      out << r.preference->company << ',' << format_number(r.preference->switching_threshold);
    else
      out << ',';
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_int(const std::string& s, std::size_t line_no, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  return value;
}

double parse_threshold(const std::string& s, std::size_t line_no) {
  if (s.empty() || s == "inf") return kNeverSwitch;
  double value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError("line " + std::to_string(line_no) + ": bad switching threshold '" + s + "'");
  return value;
}

}  // namespace

std::vector<TripRequest> read_requests_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw DataError("empty request file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRequestCsvHeader) throw DataError("line 1: unexpected header");

  std::vector<TripRequest> out;
  std::set<RequestId> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 8)
      throw DataError("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                      std::to_string(f.size()));
    TripRequest r;
    r.id = parse_int<RequestId>(f[0], line_no, "id");
    r.submit_time = parse_int<Seconds>(f[1], line_no, "submit_time_s");
    r.origin.node = parse_int<NodeId>(f[2], line_no, "origin");
    r.destination.node = parse_int<NodeId>(f[3], line_no, "destination");
    r.max_wait = parse_int<Seconds>(f[4], line_no, "max_wait_s");
    r.max_detour = parse_int<Seconds>(f[5], line_no, "max_detour_s");
    if (!f[6].empty()) {
      Preference p;
      p.company = parse_int<CompanyId>(f[6], line_no, "preference");
      p.switching_threshold = parse_threshold(f[7], line_no);
      r.preference = p;
    } else if (!f[7].empty()) {
      throw DataError("line " + std::to_string(line_no) + ": threshold without preference");
    }
    try {
      check_request(r);
    } catch (const StructuralError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(r.id).second)
      throw DataError("line " + std::to_string(line_no) + ": duplicate id " + std::to_string(r.id));
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const TripRequest& a, const TripRequest& b) {
    return a.submit_time < b.submit_time;
  });
  return out;
}

}  // namespace rideshare
