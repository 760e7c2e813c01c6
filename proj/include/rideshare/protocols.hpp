#pragma once

#include "rideshare/core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace rideshare {

struct ProtocolConfig {
  double epsilon = 0.01;
  long k_coop = 1000;
  long k_comp = 17;
  /// Seed of the broker's tie-breaking stream. Without one, a tie among
  /// competitive offers is an error.
  std::optional<std::uint64_t> broker_seed = 0;
};

/// Throws ConfigError on a non-positive epsilon or iteration cap.
void validate(const ProtocolConfig& cfg);

enum class LapBackend { auction, brute_force };

/// Vehicle i's report to the broker: its favourite request and the margin
/// between its two best net rewards.
struct BidMessage {
  Index vehicle = 0;
  Index request = 0;
  double increment = 0.0;  // best reward minus second best, >= 0
};

/// Broker-held bid prices B(i, j). Each vehicle prices requests through its
/// own row; after each round the broker broadcasts winning bids so every
/// row learns the current price of contested requests.
class BidLedger {
 public:
  BidLedger(Index vehicles, Index requests) : prices_(Eigen::MatrixXd::Zero(vehicles, requests)) {}

  double price(Index vehicle, Index request) const { return prices_(vehicle, request); }
  auto row(Index vehicle) const { return prices_.row(vehicle); }

  /// Raises B(vehicle, request) by increment + epsilon and returns the new bid.
  double raise(Index vehicle, Index request, double amount) {
    prices_(vehicle, request) += amount;
    return prices_(vehicle, request);
  }
  /// Lifts every vehicle's price for `request` to at least `price`.
  void broadcast(Index request, double price) {
    prices_.col(request) = prices_.col(request).cwiseMax(price);
  }
  const Eigen::MatrixXd& matrix() const { return prices_; }

 private:
  Eigen::MatrixXd prices_;
};

struct Offer {
  CompanyId company = 0;
  Index vehicle = 0;
  Index request = 0;
  double cost = 0.0;
};

/// One company's internal assignment, posted to the competitive broker.
struct WantedAssignment {
  CompanyId company = 0;
  std::vector<Offer> offers;
};

struct Award {
  Index request = 0;
  Index vehicle = 0;
  double price = 0.0;  // winning bid (cooperative) or accepted cost (competitive)
};

struct RoundTrace {
  long round = 0;
  std::vector<BidMessage> bids;
  std::vector<Offer> offers;
  std::vector<Award> awards;
};

using ProtocolTrace = std::vector<RoundTrace>;

struct ProtocolResult {
  Assignment assignment;
  long rounds = 0;
  bool exhausted = false;  // iteration cap hit with assignable requests left
};

/// Broker solves the whole LAP exactly (see solve_exact) or, with the
/// brute_force backend, by enumeration. Counts as a single round.
ProtocolResult run_centralized(const CostMatrix& costs, const ProtocolConfig& cfg,
                               LapBackend backend = LapBackend::auction);

/// Round-synchronous distributed auction. Every unassigned vehicle whose best
/// request is feasible computes its two best net rewards against its ledger
/// row; all bids of a round are computed from the same ledger snapshot; the
/// broker raises B(i, j_i) by the margin plus epsilon and awards each request
/// to its highest bidder (lowest vehicle index on ties). Holders keep their
/// standing bid and may be outbid.
ProtocolResult run_cooperative(const CostMatrix& costs, const std::vector<CompanyId>& company_of_row,
                               const ProtocolConfig& cfg, ProtocolTrace* trace = nullptr);

/// Picks the winning offer for one request. A customer with a preferred
/// company that made an offer switches only if a rival is cheaper by more
/// than the switching threshold; otherwise the cheapest offer wins. Cost
/// ties are broken uniformly with `rng`; a tie without rng throws.
std::size_t select_offer(const std::vector<Offer>& offers, const std::optional<Preference>& preference,
                         std::mt19937_64* rng);

/// Iterated company-wise LAPs: each company assigns its unassigned vehicles
/// to the requests it can see, the broker accepts one offer per request, and
/// the rest go round again. Strict preferences hide a request from every
/// company except the preferred one.
ProtocolResult run_competitive(const CostMatrix& costs, const std::vector<CompanyId>& company_of_row,
                               const std::vector<std::optional<Preference>>& preferences,
                               const ProtocolConfig& cfg, ProtocolTrace* trace = nullptr);

/// ceil(log m / log(P / (P - 1))): the last round index the competitive
/// protocol can reach with P equal companies and m requests.
long competitive_iteration_bound(int companies, long requests);

/// ceil(n m (1 + C / epsilon)).
long cooperative_iteration_bound(long vehicles, long requests, double max_cost, double epsilon);

}  // namespace rideshare
