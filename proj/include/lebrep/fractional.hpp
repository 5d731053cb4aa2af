#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lebrep/matrix.hpp"
#include "lebrep/paths.hpp"
#include "lebrep/payoff.hpp"
#include "lebrep/rates.hpp"

namespace lebrep {

struct FractionalOptions {
  /// Cells nearer than this (in cell count) use exact product weights.
  std::size_t local_window = 8;
  /// Step of the exponential-sum quadrature in log(lambda).
  double mode_spacing = 0.5;
  /// Modes with lambda * T below this are folded into a linear correction.
  double slow_mode_threshold = 1e-4;
};

/// Discretized Riemann-Liouville integral R_t = int_0^t (t - u)^-alpha dM_u
/// on a fixed grid, and the factorization rate
/// beta_t = sin(alpha pi) / pi * (T - t)^(alpha - 1) R_t.
///
/// Each cell j contributes w_j(t_i) dM_j, where w_j(t_i) is the exact cell
/// average of the kernel (t_i - u)^-alpha. The cell adjacent to t_i also
/// carries the part of int (t_i - u)^-alpha dW_u orthogonal to dW_j, drawn
/// from an auxiliary normal, so that Var(R_t) is exact for constant
/// integrands regardless of the kernel's singularity.
///
/// Far cells are summed through an exponential-sum representation of the
/// kernel, updated recursively in O(N * modes) per path;
/// riemann_liouville_direct() is the O(N^2) reference.
class FractionalKernel {
 public:
  FractionalKernel(GridPtr grid, double alpha, FractionalOptions options = {});

  double alpha() const { return alpha_; }
  const TimeGrid& grid() const { return *grid_; }
  std::size_t mode_count() const { return lambda_.size(); }

  /// Cell average of (t_i - u)^-alpha over [t_j, t_{j+1}], j < i.
  double weight(std::size_t i, std::size_t j) const;

  /// Standard deviation of the adjacent-cell residual for cell j.
  double residual_sd(std::size_t j) const { return residual_sd_[j]; }

  /// sin(alpha pi) / pi * (T - t_i)^(alpha - 1).
  double rate_factor(std::size_t i) const { return rate_factor_[i]; }

  /// R on nodes t_0 .. t_{N-1} for one path. `dm[j]` is the martingale
  /// increment of cell j and `residual[j]` the orthogonal adjacent-cell term
  /// (integrand times residual_sd(j) times an independent normal).
  void riemann_liouville(std::span<const double> dm, std::span<const double> residual,
                         std::span<double> out) const;

  void riemann_liouville_direct(std::span<const double> dm, std::span<const double> residual,
                                std::span<double> out) const;

 private:
  GridPtr grid_;
  double alpha_;
  FractionalOptions options_;
  std::vector<double> residual_sd_;
  std::vector<double> rate_factor_;
  std::vector<double> local_weights_;  // N x local_window, column k is cell i-1-k
  std::vector<double> lambda_;
  std::vector<double> mode_weight_;
  std::vector<double> decay_;   // N x modes
  std::vector<double> entry_;   // N x modes
  double slow_constant_ = 0.0;
  double slow_linear_ = 0.0;
};

/// Validates alpha in (0, 1/2).
void check_fractional_alpha(double alpha);

/// R for every path of the block (n_paths x N).
Matrix riemann_liouville_process(const MartingalePath& m, const PathBundle& paths,
                                 const FractionalKernel& kernel, bool direct = false);

RateProcess fractional_rate(const MartingalePath& m, const PathBundle& paths,
                            const FractionalKernel& kernel);

RateProcess fractional_rate(const MartingalePath& m, double alpha, const PathBundle& paths);

}  // namespace lebrep
