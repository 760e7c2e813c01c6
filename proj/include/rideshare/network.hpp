#pragma once

#include "rideshare/core.hpp"

#include <iosfwd>
#include <random>

namespace rideshare {

/// Travel times between network nodes, either a full table or a W x H lattice
/// with uniform edge times. Grid nodes are numbered y * width + x.
class TravelNetwork {
 public:
  enum class Kind { matrix, grid };

  static TravelNetwork grid(int width, int height, Seconds seconds_per_edge);
  static TravelNetwork matrix(Eigen::Matrix<Seconds, Eigen::Dynamic, Eigen::Dynamic> times);

  Kind kind() const { return kind_; }
  int node_count() const;
  bool valid(Location loc) const { return loc.node >= 0 && loc.node < node_count(); }

  Seconds travel_time(Location from, Location to) const;

  /// First node after `from` on a shortest path to `to`; `to` itself for
  /// matrix networks, one lattice step (x first, then y) for grids.
  Location next_hop(Location from, Location to) const;

  int width() const { return width_; }
  int height() const { return height_; }
  Seconds seconds_per_edge() const { return edge_; }
  Location grid_node(int x, int y) const { return Location{y * width_ + x}; }

 private:
  void require(Location loc) const;

  Kind kind_ = Kind::grid;
  int width_ = 0;
  int height_ = 0;
  Seconds edge_ = 0;
  Eigen::Matrix<Seconds, Eigen::Dynamic, Eigen::Dynamic> times_;
};

/// Reads an n x n CSV of integer seconds.
TravelNetwork read_matrix_network(std::istream& in);

/// max(0, cost + N(0, sigma^2)); the sentinel and sigma == 0 pass through.
double apply_noise(double cost, double sigma, std::mt19937_64& rng);

/// cost * (1 + bias_fraction); the sentinel passes through.
double apply_bias(double cost, double bias_fraction);

/// SplitMix64 finalizer, used to derive independent seeds from coordinates.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t master, Rest... rest) {
  std::uint64_t s = master;
  ((s = mix_seed(s, static_cast<std::uint64_t>(rest))), ...);
  return s;
}

}  // namespace rideshare
