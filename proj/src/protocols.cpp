#include "rideshare/protocols.hpp"
#include "rideshare/lap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace rideshare {

void validate(const ProtocolConfig& cfg) {
  if (!(cfg.epsilon > 0)) throw ConfigError("protocol epsilon must be positive");
  if (cfg.k_coop < 1) throw ConfigError("k_coop must be at least 1");
  if (cfg.k_comp < 1) throw ConfigError("k_comp must be at least 1");
}

ProtocolResult run_centralized(const CostMatrix& costs, const ProtocolConfig& cfg, LapBackend backend) {
  validate(cfg);
  ProtocolResult out;
  out.rounds = 1;
  if (backend == LapBackend::brute_force) {
    const CostMatrix square = pad_to_square(costs);
    Assignment a = solve_brute_force(square);
    std::erase_if(a.unassigned_cols, [&](Index j) { return j >= costs.cols(); });
    out.assignment = std::move(a);
  } else {
    out.assignment = solve_exact(costs);
  }
  return out;
}

namespace {

struct RewardScan {
  Index best_col = -1;
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
};

// Columns that are sentinel in every row are never bid on, so their value is
// always -SENTINEL; they are folded into one virtual column.
RewardScan scan_rewards(const CostMatrix& costs, const BidLedger& ledger, Index i,
                        const std::vector<Index>& live, Index first_dead) {
  RewardScan s;
  auto consider = [&](Index j, double value) {
    if (value > s.best || (value == s.best && j < s.best_col)) {
      s.second = s.best;
      s.best = value;
      s.best_col = j;
    } else if (value > s.second) {
      s.second = value;
    }
  };
  for (Index j : live) consider(j, -costs(i, j) - ledger.price(i, j));
  if (first_dead >= 0) consider(first_dead, -kSentinel);
  return s;
}

}  // namespace

ProtocolResult run_cooperative(const CostMatrix& costs, const std::vector<CompanyId>& company_of_row,
                               const ProtocolConfig& cfg, ProtocolTrace* trace) {
  validate(cfg);
  const Index n = costs.rows();
  const Index m = costs.cols();
  if (static_cast<Index>(company_of_row.size()) != n)
    throw std::invalid_argument("every vehicle row needs an owning company");

  ProtocolResult out;
  if (n == 0 || m == 0) {
    out.assignment = make_assignment(costs, std::vector<Index>(static_cast<std::size_t>(n), -1));
    return out;
  }

  // Companies in ascending id order, each with its vehicles.
  std::map<CompanyId, std::vector<Index>> fleets;
  for (Index i = 0; i < n; ++i) fleets[company_of_row[static_cast<std::size_t>(i)]].push_back(i);

  std::vector<Index> live;
  Index first_dead = -1;
  for (Index j = 0; j < m; ++j) {
    if ((costs.col(j).array() < kSentinel).any())
      live.push_back(j);
    else if (first_dead < 0)
      first_dead = j;
  }

  BidLedger ledger(n, m);
  std::vector<Index> col_of_row(static_cast<std::size_t>(n), -1);
  std::vector<Index> holder(static_cast<std::size_t>(m), -1);

  while (true) {
    // Company side: every unassigned vehicle with a feasible favourite bids.
    std::vector<BidMessage> bids;
    for (const auto& [company, rows] : fleets) {
      (void)company;
      for (Index i : rows) {
        if (col_of_row[static_cast<std::size_t>(i)] >= 0) continue;
        const RewardScan s = scan_rewards(costs, ledger, i, live, first_dead);
        if (is_sentinel(costs(i, s.best_col))) continue;
        const double margin = m > 1 ? s.best - s.second : 0.0;
        bids.push_back({i, s.best_col, margin});
      }
    }
    if (bids.empty()) break;
    if (out.rounds >= cfg.k_coop) {
      out.exhausted = true;
      break;
    }
    ++out.rounds;

    // Broker side: apply all bids, then award each contested request.
    std::map<Index, std::pair<double, Index>> top;  // request -> (bid, vehicle)
    for (const auto& b : bids) {
      const double bid = ledger.raise(b.vehicle, b.request, b.increment + cfg.epsilon);
      auto [it, fresh] = top.try_emplace(b.request, bid, b.vehicle);
      if (!fresh && (bid > it->second.first || (bid == it->second.first && b.vehicle < it->second.second)))
        it->second = {bid, b.vehicle};
    }
    RoundTrace round;
    for (const auto& [j, win] : top) {
      const auto [price, i] = win;
      Index& prev = holder[static_cast<std::size_t>(j)];
      if (prev >= 0) col_of_row[static_cast<std::size_t>(prev)] = -1;
      prev = i;
      col_of_row[static_cast<std::size_t>(i)] = j;
      ledger.broadcast(j, price);
      if (trace) round.awards.push_back({j, i, price});
    }
    if (trace) {
      round.round = out.rounds;
      round.bids = std::move(bids);
      trace->push_back(std::move(round));
    }
  }
  out.assignment = make_assignment(costs, col_of_row);
  return out;
}

std::size_t select_offer(const std::vector<Offer>& offers, const std::optional<Preference>& preference,
                         std::mt19937_64* rng) {
  if (offers.empty()) throw std::invalid_argument("no offers to select from");

  auto cheapest = [&](auto&& eligible) -> std::size_t {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> tied;
    for (std::size_t k = 0; k < offers.size(); ++k) {
      if (!eligible(offers[k])) continue;
      if (offers[k].cost < best) {
        best = offers[k].cost;
        tied.assign(1, k);
      } else if (offers[k].cost == best) {
        tied.push_back(k);
      }
    }
    if (tied.size() == 1) return tied.front();
    if (!rng) throw std::logic_error("tied offers need a seeded broker rng");
    std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
    return tied[pick(*rng)];
  };

  if (preference) {
    const auto own = std::find_if(offers.begin(), offers.end(),
                                  [&](const Offer& o) { return o.company == preference->company; });
    if (own != offers.end()) {
      const bool has_rival = std::any_of(offers.begin(), offers.end(),
                                         [&](const Offer& o) { return o.company != preference->company; });
      if (!has_rival) return static_cast<std::size_t>(own - offers.begin());
      const std::size_t rival = cheapest([&](const Offer& o) { return o.company != preference->company; });
      if (offers[rival].cost < own->cost - preference->switching_threshold) return rival;
      return static_cast<std::size_t>(own - offers.begin());
    }
  }
  return cheapest([](const Offer&) { return true; });
}

ProtocolResult run_competitive(const CostMatrix& costs, const std::vector<CompanyId>& company_of_row,
                               const std::vector<std::optional<Preference>>& preferences,
                               const ProtocolConfig& cfg, ProtocolTrace* trace) {
  validate(cfg);
  const Index n = costs.rows();
  const Index m = costs.cols();
  if (static_cast<Index>(company_of_row.size()) != n)
    throw std::invalid_argument("every vehicle row needs an owning company");
  if (!preferences.empty() && static_cast<Index>(preferences.size()) != m)
    throw std::invalid_argument("preferences must cover every request column");

  std::optional<std::mt19937_64> rng;
  if (cfg.broker_seed) rng.emplace(*cfg.broker_seed);

  std::set<CompanyId> companies(company_of_row.begin(), company_of_row.end());
  auto visible = [&](CompanyId p, Index j) {
    if (preferences.empty()) return true;
    const auto& pref = preferences[static_cast<std::size_t>(j)];
    return !pref || !pref->strict() || pref->company == p;
  };
  auto pref_of = [&](Index j) -> std::optional<Preference> {
    return preferences.empty() ? std::nullopt : preferences[static_cast<std::size_t>(j)];
  };

  std::vector<Index> col_of_row(static_cast<std::size_t>(n), -1);
  std::vector<bool> col_done(static_cast<std::size_t>(m), false);
  ProtocolResult out;

  while (true) {
    std::vector<WantedAssignment> wanted;
    for (CompanyId p : companies) {
      std::vector<Index> rows, cols;
      for (Index i = 0; i < n; ++i)
        if (company_of_row[static_cast<std::size_t>(i)] == p && col_of_row[static_cast<std::size_t>(i)] < 0)
          rows.push_back(i);
      for (Index j = 0; j < m; ++j)
        if (!col_done[static_cast<std::size_t>(j)] && visible(p, j)) cols.push_back(j);
      if (rows.empty() || cols.empty()) continue;
      const CostMatrix sub = costs(rows, cols);
      const Assignment local = solve_exact(sub);
      WantedAssignment w{p, {}};
      for (auto [r, c] : local.pairs)
        w.offers.push_back({p, rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)], sub(r, c)});
      if (!w.offers.empty()) wanted.push_back(std::move(w));
    }
    if (wanted.empty()) break;
    if (out.rounds >= cfg.k_comp) {
      out.exhausted = true;
      break;
    }
    ++out.rounds;

    std::map<Index, std::vector<Offer>> by_request;
    for (const auto& w : wanted)
      for (const auto& o : w.offers) by_request[o.request].push_back(o);

    RoundTrace round;
    for (auto& [j, offers] : by_request) {
      const Offer& win = offers[select_offer(offers, pref_of(j), rng ? &*rng : nullptr)];
      col_of_row[static_cast<std::size_t>(win.vehicle)] = j;
      col_done[static_cast<std::size_t>(j)] = true;
      if (trace) round.awards.push_back({j, win.vehicle, win.cost});
    }
    if (trace) {
      round.round = out.rounds;
      for (const auto& w : wanted) round.offers.insert(round.offers.end(), w.offers.begin(), w.offers.end());
      trace->push_back(std::move(round));
    }
  }
  out.assignment = make_assignment(costs, col_of_row);
  return out;
}

long competitive_iteration_bound(int companies, long requests) {
  if (companies < 2) throw std::invalid_argument("competitive bound needs at least two companies");
  if (requests < 1) throw std::invalid_argument("competitive bound needs at least one request");
  const double p = companies;
  const double x = std::log(static_cast<double>(requests)) / std::log(p / (p - 1.0));
  return static_cast<long>(std::ceil(x - 1e-9));
}

long cooperative_iteration_bound(long vehicles, long requests, double max_cost, double epsilon) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (vehicles <= 0 || requests <= 0 || !(max_cost > 0))
    throw std::invalid_argument("cooperative bound needs positive sizes and cost");
  const double x = static_cast<double>(vehicles) * static_cast<double>(requests) * (1.0 + max_cost / epsilon);
  return static_cast<long>(std::ceil(x - 1e-9 * x));
}

}  // namespace rideshare
