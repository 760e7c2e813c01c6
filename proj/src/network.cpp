#include "rideshare/network.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <string>

namespace rideshare {

TravelNetwork TravelNetwork::grid(int width, int height, Seconds seconds_per_edge) {
  if (width < 1 || height < 1 || seconds_per_edge < 0)
    throw StructuralError("grid network needs positive size and nonnegative edge time");
  TravelNetwork net;
  net.kind_ = Kind::grid;
  net.width_ = width;
  net.height_ = height;
  net.edge_ = seconds_per_edge;
  return net;
}

TravelNetwork TravelNetwork::matrix(Eigen::Matrix<Seconds, Eigen::Dynamic, Eigen::Dynamic> times) {
  if (times.rows() != times.cols() || times.rows() == 0)
    throw StructuralError("travel-time matrix must be square and nonempty");
  if ((times.array() < 0).any()) throw StructuralError("travel times must be nonnegative");
  if ((times.diagonal().array() != 0).any())
    throw StructuralError("travel time from a node to itself must be zero");
  TravelNetwork net;
  net.kind_ = Kind::matrix;
  net.times_ = std::move(times);
  return net;
}

int TravelNetwork::node_count() const {
  return kind_ == Kind::grid ? width_ * height_ : static_cast<int>(times_.rows());
}

void TravelNetwork::require(Location loc) const {
  if (!valid(loc)) throw StructuralError("location " + std::to_string(loc.node) + " outside network");
}

Seconds TravelNetwork::travel_time(Location from, Location to) const {
  require(from);
  require(to);
  if (kind_ == Kind::matrix) return times_(from.node, to.node);
  const int dx = std::abs(from.node % width_ - to.node % width_);
  const int dy = std::abs(from.node / width_ - to.node / width_);
  return static_cast<Seconds>(dx + dy) * edge_;
}

Location TravelNetwork::next_hop(Location from, Location to) const {
  require(from);
  require(to);
  if (kind_ == Kind::matrix || from == to) return to;
  const int fx = from.node % width_, fy = from.node / width_;
  const int tx = to.node % width_, ty = to.node / width_;
  if (fx != tx) return grid_node(fx + (tx > fx ? 1 : -1), fy);
  return grid_node(fx, fy + (ty > fy ? 1 : -1));
}

TravelNetwork read_matrix_network(std::istream& in) {
  std::vector<std::vector<Seconds>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<Seconds> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stoll(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError("matrix network line " + std::to_string(line_no) + ": bad entry '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::Matrix<Seconds, Eigen::Dynamic, Eigen::Dynamic> times(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != n)
      throw DataError("matrix network row " + std::to_string(i + 1) + " has wrong length");
    for (Eigen::Index j = 0; j < n; ++j) times(i, j) = row[static_cast<std::size_t>(j)];
  }
  try {
    return TravelNetwork::matrix(std::move(times));
  } catch (const StructuralError& e) {
    throw DataError(e.what());
  }
}

double apply_noise(double cost, double sigma, std::mt19937_64& rng) {
  if (is_sentinel(cost) || sigma == 0.0) return cost;
  std::normal_distribution<double> draw(0.0, sigma);
  return std::max(0.0, cost + draw(rng));
}

double apply_bias(double cost, double bias_fraction) {
  if (is_sentinel(cost)) return cost;
  if (!(bias_fraction > -1.0)) throw std::invalid_argument("bias fraction must exceed -1");
  return cost * (1.0 + bias_fraction);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rideshare
