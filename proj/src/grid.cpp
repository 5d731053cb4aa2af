#include "lebrep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lebrep {

TimeGrid::TimeGrid(double horizon, std::vector<double> nodes, double grading)
    : horizon_(horizon), grading_(grading), nodes_(std::move(nodes)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw std::invalid_argument("TimeGrid: horizon must be positive and finite");
  }
  if (nodes_.size() < 2) {
    throw std::invalid_argument("TimeGrid: need at least two nodes");
  }
  if (nodes_.front() != 0.0 || nodes_.back() != horizon_) {
    throw std::invalid_argument("TimeGrid: nodes must start at 0 and end at T");
  }
  steps_.resize(nodes_.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    if (!(nodes_[i + 1] > nodes_[i])) {
      throw std::invalid_argument("TimeGrid: nodes not strictly increasing at index " +
                                  std::to_string(i));
    }
    steps_[i] = nodes_[i + 1] - nodes_[i];
  }
}

std::size_t TimeGrid::nearest_node(double t) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
  if (it == nodes_.begin()) return 0;
  if (it == nodes_.end()) return nodes_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - nodes_.begin());
  return (t - nodes_[hi - 1] <= nodes_[hi] - t) ? hi - 1 : hi;
}

std::size_t TimeGrid::last_node_at_or_before(double t) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  if (it == nodes_.begin()) return 0;
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

TimeGrid TimeGrid::coarsened() const {
  const std::size_t n = intervals();
  if (n % 2 != 0 || n < 4) {
    throw std::invalid_argument("TimeGrid::coarsened: need an even interval count >= 4");
  }
  std::vector<double> coarse(n / 2 + 1);
  for (std::size_t i = 0; i <= n / 2; ++i) coarse[i] = nodes_[2 * i];
  return TimeGrid(horizon_, std::move(coarse), grading_);
}

TimeGrid build_grid(double horizon, std::size_t intervals, double grading) {
  if (!(horizon > 0.0)) throw std::invalid_argument("build_grid: T must be > 0");
  if (intervals < 2) throw std::invalid_argument("build_grid: N must be >= 2");
  if (!(grading >= 1.0)) throw std::invalid_argument("build_grid: q must be >= 1");

  std::vector<double> nodes(intervals + 1);
  const double n = static_cast<double>(intervals);
  for (std::size_t i = 0; i < intervals; ++i) {
    const double remaining_fraction = 1.0 - static_cast<double>(i) / n;
    nodes[i] = horizon * (1.0 - std::pow(remaining_fraction, grading));
  }
  nodes[0] = 0.0;
  nodes[intervals] = horizon;
  if (!(nodes[intervals - 1] < horizon)) {
    throw std::invalid_argument("build_grid: grading too strong, last interior node reaches T");
  }
  return TimeGrid(horizon, std::move(nodes), grading);
}

}  // namespace lebrep
