#pragma once

#include "rideshare/core.hpp"
#include "rideshare/network.hpp"

#include <optional>

namespace rideshare {

/// Number of feasible insertion positions examined before picking the best.
inline constexpr int kInsertionCandidates = 3;

struct Insertion {
  Route route;
  Seconds cost = 0;  // duration of `route` measured from `now`
};

/// Time the vehicle can start executing its route: its committed position
/// time, or `now` if that already passed.
Seconds route_start_time(const Vehicle& vehicle, Seconds now);

/// Rewrites every stop's scheduled_time by walking the stops in order from
/// the vehicle's position.
void reschedule(Route& route, const Vehicle& vehicle, const TravelNetwork& net, Seconds now);

/// Time from `now` until the last stop is served; 0 for an empty route.
Seconds route_duration(const Route& route, const Vehicle& vehicle, const TravelNetwork& net,
                       Seconds now);

/// Single-vehicle dial-a-ride by insertion. Pickup positions are scanned
/// front to back and, for each, dropoff positions after it front to back.
/// The first kInsertionCandidates positions that pass validate_route are
/// kept and the shortest is returned (earliest on ties). Existing stops keep
/// their relative order. `scheduled` must hold every request already in the
/// vehicle's route or onboard; nullopt means infeasible.
std::optional<Insertion> insert_request(const Vehicle& vehicle, const TripRequest& request,
                                        const TravelNetwork& net, Seconds now,
                                        const RequestTable& scheduled);

}  // namespace rideshare
