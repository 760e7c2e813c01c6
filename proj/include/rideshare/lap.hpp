#pragma once

#include "rideshare/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace rideshare {

/// Largest matrix the permutation oracle accepts.
inline constexpr Index kBruteForceMaxSize = 10;

/// Pads a rectangular cost matrix to square with sentinel rows or columns.
template <typename Derived>
CostMatrixX<typename Derived::Scalar> pad_to_square(const Eigen::MatrixBase<Derived>& costs) {
  using Scalar = typename Derived::Scalar;
  const Index n = std::max(costs.rows(), costs.cols());
  CostMatrixX<Scalar> out = CostMatrixX<Scalar>::Constant(n, n, static_cast<Scalar>(kSentinel));
  out.topLeftCorner(costs.rows(), costs.cols()) = costs;
  return out;
}

/// Minimum-cost permutation by enumeration. Ties resolve to the
/// lexicographically smallest permutation. Refuses n > kBruteForceMaxSize.
template <typename Derived>
Assignment solve_brute_force(const Eigen::MatrixBase<Derived>& costs) {
  const Index n = costs.rows();
  if (costs.cols() != n) throw std::invalid_argument("brute force needs a square matrix");
  if (n > kBruteForceMaxSize) throw std::invalid_argument("brute force refused for n > 10");
  const CostMatrix c = costs.template cast<double>();

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<Index> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) total += c(i, perm[static_cast<std::size_t>(i)]);
    if (total < best_cost) {
      best_cost = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return make_assignment(c, best);
}

struct AuctionResult {
  Assignment assignment;
  std::vector<Index> col_of_row;  // full permutation, sentinel pairs included
  Eigen::VectorXd prices;
  long bids = 0;
};

namespace detail {

/// One forward-auction pass from the given prices; returns the full
/// row-to-column permutation.
inline std::vector<Index> auction_pass(const CostMatrix& c, double epsilon, Eigen::VectorXd& prices,
                                       long& bids) {
  const Index n = c.rows();
  std::vector<Index> col_of_row(static_cast<std::size_t>(n), -1);
  std::vector<Index> row_of_col(static_cast<std::size_t>(n), -1);
  std::deque<Index> unassigned(static_cast<std::size_t>(n));
  std::iota(unassigned.begin(), unassigned.end(), Index{0});

  while (!unassigned.empty()) {
    const Index i = unassigned.front();
    unassigned.pop_front();

    Index best_j = -1;
    double best = -std::numeric_limits<double>::infinity();
    double second = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      const double value = -c(i, j) - prices(j);
      if (value > best) {
        second = best;
        best = value;
        best_j = j;
      } else if (value > second) {
        second = value;
      }
    }
    prices(best_j) += (n > 1 ? best - second : 0.0) + epsilon;
    ++bids;

    const Index previous = row_of_col[static_cast<std::size_t>(best_j)];
    if (previous >= 0) {
      col_of_row[static_cast<std::size_t>(previous)] = -1;
      unassigned.push_back(previous);
    }
    row_of_col[static_cast<std::size_t>(best_j)] = i;
    col_of_row[static_cast<std::size_t>(i)] = best_j;
  }
  return col_of_row;
}

}  // namespace detail

/// Forward auction (Gauss-Seidel, one bidder at a time) on a square matrix
/// with fixed epsilon and zero initial prices. Rows bid for columns; the
/// sentinel is an ordinary cost during bidding and is filtered at output.
/// Best-column ties go to the lowest column index. The result satisfies
/// epsilon-complementary slackness, so its objective is within n * epsilon
/// of optimal.
template <typename Derived>
AuctionResult solve_auction(const Eigen::MatrixBase<Derived>& costs, double epsilon) {
  const Index n = costs.rows();
  if (costs.cols() != n) throw std::invalid_argument("auction needs a square matrix");
  if (!(epsilon > 0)) throw std::invalid_argument("auction epsilon must be positive");
  const CostMatrix c = costs.template cast<double>();

  AuctionResult r;
  r.prices = Eigen::VectorXd::Zero(n);
  r.col_of_row = detail::auction_pass(c, epsilon, r.prices, r.bids);
  r.assignment = make_assignment(c, r.col_of_row);
  return r;
}

/// Coarsest resolution in {1, 0.1, 0.01, 0.001} seconds on which every
/// feasible entry lies exactly; 0.001 when none does.
template <typename Derived>
double integer_resolution(const Eigen::MatrixBase<Derived>& costs) {
  for (double res : {1.0, 0.1, 0.01, 0.001}) {
    bool exact = true;
    for (Index i = 0; i < costs.rows() && exact; ++i)
      for (Index j = 0; j < costs.cols() && exact; ++j) {
        const double v = static_cast<double>(costs(i, j));
        if (is_sentinel(v)) continue;
        const double scaled = v / res;
        exact = std::abs(scaled - std::round(scaled)) < 1e-6;
      }
    if (exact) return res;
  }
  return 0.001;
}

/// Exact LAP: pads, integerizes at integer_resolution, and runs the auction
/// down to epsilon = 1/(n+1) in integer units, which makes the result optimal
/// for costs on that grid. On the integer grid the sentinel is replaced by
/// n * (largest feasible cost) + 1, still dearer than any set of feasible
/// pairs, and epsilon is scaled down from the cost range so that bidding
/// wars against the sentinel stay short. The objective is reported on the
/// input costs.
template <typename Derived>
Assignment solve_exact(const Eigen::MatrixBase<Derived>& costs) {
  const CostMatrix square = pad_to_square(costs.template cast<double>());
  const Index n = square.rows();
  if (n == 0) return {};
  const double res = integer_resolution(square);
  double top = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (!is_sentinel(square(i, j))) top = std::max(top, std::round(square(i, j) / res));
  const double big = static_cast<double>(n) * top + 1.0;
  const CostMatrix quantized = square.unaryExpr([res, big](double v) {
    return is_sentinel(v) ? big : std::round(v / res);
  });

  const double final_eps = 1.0 / static_cast<double>(n + 1);
  Eigen::VectorXd prices = Eigen::VectorXd::Zero(n);
  long bids = 0;
  std::vector<Index> col_of_row;
  for (double eps = std::max(big / 8.0, final_eps);; eps = std::max(eps / 8.0, final_eps)) {
    col_of_row = detail::auction_pass(quantized, eps, prices, bids);
    if (eps == final_eps) break;
  }
  Assignment a = make_assignment(square, col_of_row);
  // Drop pairs that landed on padding.
  std::erase_if(a.pairs, [&](const auto& p) { return p.first >= costs.rows() || p.second >= costs.cols(); });
  std::erase_if(a.unassigned_cols, [&](Index j) { return j >= costs.cols(); });
  return a;
}

}  // namespace rideshare
