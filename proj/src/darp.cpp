#include "rideshare/darp.hpp"

#include <algorithm>

namespace rideshare {

Seconds route_start_time(const Vehicle& vehicle, Seconds now) {
  return std::max(vehicle.position_time, now);
}

void reschedule(Route& route, const Vehicle& vehicle, const TravelNetwork& net, Seconds now) {
  Seconds t = route_start_time(vehicle, now);
  Location at = vehicle.location;
  for (auto& stop : route.stops) {
    t += net.travel_time(at, stop.location);
    stop.scheduled_time = t;
    at = stop.location;
  }
}

Seconds route_duration(const Route& route, const Vehicle& vehicle, const TravelNetwork& net,
                       Seconds now) {
  if (route.empty()) return 0;
  Seconds t = route_start_time(vehicle, now);
  Location at = vehicle.location;
  for (const auto& stop : route.stops) {
    t += net.travel_time(at, stop.location);
    at = stop.location;
  }
  return t - now;
}

std::optional<Insertion> insert_request(const Vehicle& vehicle, const TripRequest& request,
                                        const TravelNetwork& net, Seconds now,
                                        const RequestTable& scheduled) {
  const auto& old = vehicle.route.stops;

  // Only the requests this vehicle touches are needed for validation.
  RequestTable local;
  for (const auto& s : old) local.insert(scheduled.at(s.request));
  for (const auto& p : vehicle.onboard) local.insert(scheduled.at(p.request));
  if (local.contains(request.id))
    throw StructuralError("request " + std::to_string(request.id) + " already in route");
  local.insert(request);

  const Stop pickup{request.id, StopKind::pickup, request.origin, 0};
  const Stop dropoff{request.id, StopKind::dropoff, request.destination, 0};
  const std::size_t n = old.size();

  std::optional<Insertion> best;
  int found = 0;
  Route candidate;
  candidate.stops.reserve(n + 2);
  for (std::size_t p = 0; p <= n && found < kInsertionCandidates; ++p) {
    // d indexes the dropoff within the new sequence, strictly after the pickup.
    for (std::size_t d = p + 1; d <= n + 1 && found < kInsertionCandidates; ++d) {
      candidate.stops.clear();
      std::size_t src = 0;
      for (std::size_t k = 0; k < n + 2; ++k) {
        if (k == p)
          candidate.stops.push_back(pickup);
        else if (k == d)
          candidate.stops.push_back(dropoff);
        else
          candidate.stops.push_back(old[src++]);
      }
      reschedule(candidate, vehicle, net, now);
      if (!validate_route(candidate, vehicle, local, net).empty()) continue;
      ++found;
      const Seconds cost = candidate.stops.back().scheduled_time - now;
      if (!best || cost < best->cost) best = Insertion{candidate, cost};
    }
  }
  return best;
}

}  // namespace rideshare
