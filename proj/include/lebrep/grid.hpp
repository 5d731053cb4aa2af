#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lebrep {

/// Discretization of [0, T] with power grading toward the terminal time.
///
/// Nodes are t_i = T * (1 - (1 - i/N)^q). For q > 1 the spacing shrinks
/// toward T, where the singular kernels (T - t)^-1 and (T - t)^(2a - 2)
/// concentrate their mass. Only absolute times are stored.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::vector<double> nodes, double grading);

  double horizon() const { return horizon_; }
  double grading() const { return grading_; }

  /// Number of intervals N; there are N + 1 nodes.
  std::size_t intervals() const { return nodes_.size() - 1; }

  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }

  /// t_{i+1} - t_i for i < N.
  std::span<const double> steps() const { return steps_; }
  double step(std::size_t i) const { return steps_[i]; }

  /// T - t_i, recomputed from the stored absolute time.
  double remaining(std::size_t i) const { return horizon_ - nodes_[i]; }

  /// Index of the node closest to t (ties resolve to the lower index).
  std::size_t nearest_node(double t) const;

  /// Largest node index i with t_i <= t.
  std::size_t last_node_at_or_before(double t) const;

  /// The nested grid made of every other node. Requires N even.
  TimeGrid coarsened() const;

 private:
  double horizon_;
  double grading_;
  std::vector<double> nodes_;
  std::vector<double> steps_;
};

/// Graded grid on [0, T] with N intervals; q = 1 is uniform.
TimeGrid build_grid(double horizon, std::size_t intervals, double grading = 2.0);

}  // namespace lebrep
