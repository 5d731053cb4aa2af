#pragma once

#include <vector>

#include "lebrep/matrix.hpp"
#include "lebrep/paths.hpp"
#include "lebrep/payoff.hpp"

namespace lebrep {

/// Adapted rate beta on the nodes t_i < T (n_paths x N). The value at node i
/// depends only on increments with index < i.
struct RateProcess {
  GridPtr grid;
  Matrix values;

  std::size_t n_paths() const { return values.rows(); }
  std::span<const double> path(std::size_t p) const { return values.row(p); }
};

/// Minimal-norm rate: beta_i = M_0 / T + sum_{j<i} sigma_j dW_j / (T - t_j).
RateProcess canonical_rate(const MartingalePath& m, const PathBundle& paths);

/// Integrated-by-parts form: beta_i = M_i / (T - t_i) - sum_{j<i} M_j dt_j / (T - t_j)^2.
RateProcess lebesgue_form_rate(const MartingalePath& m);

/// Explicit forward solve of beta_i (T - t_i) + sum_{j<i} beta_j dt_j = M_i.
RateProcess volterra_rate(const MartingalePath& m);

/// Left-point quadrature sum_i beta_i dt_i per path.
std::vector<double> integrate_rate(const RateProcess& beta);

/// The exponent placing the factorization rate in L^{p,1}: 3/4 - 1/(2p), p in (1, 2).
double alpha_for_p(double p);

}  // namespace lebrep
