#pragma once

#include <cstddef>
#include <vector>

#include "lebrep/grid.hpp"
#include "lebrep/matrix.hpp"

namespace lebrep {

/// Composition powers of the kernel K(t, s) = -(T - t)^-1 1{s <= t} on a
/// small set of nodes below T, and the partial sums of the series.
///
/// K^0 = K and K^i(t, s) = int_s^t K(t, u) K^{i-1}(u, s) du. In closed form
/// K^i(t, s) = (-1)^(i+1) (T - t)^-1 L^i / i!, L = log((T - s) / (T - t)),
/// so sum_i K^i(t, s) = -(T - s)^-1. partial_sum() reports the sign-flipped
/// series S_m = -sum_{i<=m} K^i, which tends to +(T - s)^-1.
class ResolventTable {
 public:
  /// `nodes` ascending and strictly below `horizon`. The numerical
  /// compositions use `refine` trapezoid panels per node interval.
  ResolventTable(double horizon, std::vector<double> nodes, int order, int refine = 64);

  double horizon() const { return horizon_; }
  int order() const { return order_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }

  /// K^i(t_a, t_b) from the closed form (zero for b > a).
  double closed_form(int i, std::size_t a, std::size_t b) const { return closed_[i](a, b); }
  /// K^i(t_a, t_b) from repeated quadrature of the composition integral.
  double numerical(int i, std::size_t a, std::size_t b) const { return numeric_[i](a, b); }
  /// S_m(t_a, t_b) for m <= order, from the closed-form terms.
  double partial_sum(int m, std::size_t a, std::size_t b) const { return sums_[m](a, b); }
  /// (T - t_a)^-1 L^(m+1) / (m+1)!.
  double remainder_bound(int m, std::size_t a, std::size_t b) const;

  /// max over pairs b <= a of |S_m - (T - t_b)^-1|.
  double max_sum_error(int m) const;
  /// max over pairs b <= a of |numerical - closed form| for K^i.
  double max_composition_error(int i) const;

 private:
  double horizon_;
  int order_;
  std::vector<double> nodes_;
  std::vector<Matrix> closed_;
  std::vector<Matrix> numeric_;
  std::vector<Matrix> sums_;
};

/// Table on the first `max_nodes` nodes of the grid (its widest cells for
/// q >= 1), never including t_N = T.
ResolventTable resolvent_table(const TimeGrid& grid, int order, std::size_t max_nodes = 64);

}  // namespace lebrep
