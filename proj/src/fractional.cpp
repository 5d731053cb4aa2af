#include "lebrep/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lebrep {

namespace {

// a^(1-alpha) - (a - d)^(1-alpha) for 0 < d <= a, without cancellation.
double power_difference(double a, double d, double one_minus_alpha) {
  const double head = std::pow(a, one_minus_alpha);
  if (d >= a) return head;
  return -head * std::expm1(one_minus_alpha * std::log1p(-d / a));
}

// (1 - e^-z) / z
double phi(double z) {
  if (z < 1e-8) return 1.0 - 0.5 * z;
  return -std::expm1(-z) / z;
}

}  // namespace

void check_fractional_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("fractional kernel: alpha must lie in (0, 1/2)");
  }
}

FractionalKernel::FractionalKernel(GridPtr grid, double alpha, FractionalOptions options)
    : grid_(std::move(grid)), alpha_(alpha), options_(options) {
  check_fractional_alpha(alpha);
  if (!grid_) throw std::invalid_argument("FractionalKernel: null grid");
  if (options_.local_window < 1) throw std::invalid_argument("FractionalKernel: local_window must be >= 1");
  if (!(options_.mode_spacing > 0.0) || !(options_.slow_mode_threshold > 0.0)) {
    throw std::invalid_argument("FractionalKernel: mode spacing and threshold must be positive");
  }

  const TimeGrid& g = *grid_;
  const std::size_t n = g.intervals();
  const std::size_t lw = options_.local_window;
  const double horizon = g.horizon();

  residual_sd_.resize(n);
  const double excess = 1.0 / (1.0 - 2.0 * alpha) - 1.0 / ((1.0 - alpha) * (1.0 - alpha));
  for (std::size_t j = 0; j < n; ++j) {
    residual_sd_[j] = std::sqrt(std::pow(g.step(j), 1.0 - 2.0 * alpha) * excess);
  }

  rate_factor_.resize(n);
  const double c = std::sin(alpha * std::numbers::pi) / std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) rate_factor_[i] = c * std::pow(g.remaining(i), alpha - 1.0);

  local_weights_.assign(n * lw, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t k = 0; k < lw && k < i; ++k) local_weights_[i * lw + k] = weight(i, i - 1 - k);
  }

  // Exponential sum for x^-alpha = 1/Gamma(alpha) int exp(alpha y - e^y x) dy,
  // trapezoid in y. Far cells sit at distance >= delta_min from the node.
  double delta_min = horizon;
  for (std::size_t i = lw; i < n; ++i) delta_min = std::min(delta_min, g.node(i) - g.node(i - lw));
  const double h = options_.mode_spacing;
  const double y_slow = std::log(options_.slow_mode_threshold / horizon);
  const double y_fast = std::log(40.0 / delta_min);
  const double inv_gamma = 1.0 / std::tgamma(alpha);
  for (double y = y_slow; y <= y_fast + h; y += h) {
    lambda_.push_back(std::exp(y));
    mode_weight_.push_back(h * std::exp(alpha * y) * inv_gamma);
  }
  // Modes below y_slow: e^{-lambda x} ~ 1 - lambda x, summed geometrically.
  slow_constant_ = h * std::exp(alpha * (y_slow - h)) * inv_gamma / -std::expm1(-alpha * h);
  slow_linear_ =
      h * std::exp((alpha + 1.0) * (y_slow - h)) * inv_gamma / -std::expm1(-(alpha + 1.0) * h);

  const std::size_t modes = lambda_.size();
  decay_.assign(n * modes, 0.0);
  entry_.assign(n * modes, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < modes; ++l) decay_[i * modes + l] = std::exp(-lambda_[l] * g.step(i));
  }
  // Cell j enters the history sum at node j + lw + 1.
  for (std::size_t j = 0; j + lw + 1 < n; ++j) {
    const double gap = g.node(j + lw + 1) - g.node(j + 1);
    for (std::size_t l = 0; l < modes; ++l) {
      entry_[j * modes + l] = std::exp(-lambda_[l] * gap) * phi(lambda_[l] * g.step(j));
    }
  }
}

double FractionalKernel::weight(std::size_t i, std::size_t j) const {
  if (j >= i) throw std::out_of_range("FractionalKernel::weight: need j < i");
  const TimeGrid& g = *grid_;
  const double a = g.node(i) - g.node(j);
  const double d = g.step(j);
  const double om = 1.0 - alpha_;
  return power_difference(a, j + 1 == i ? a : d, om) / (om * d);
}

void FractionalKernel::riemann_liouville(std::span<const double> dm,
                                         std::span<const double> residual,
                                         std::span<double> out) const {
  const TimeGrid& g = *grid_;
  const std::size_t n = g.intervals();
  const std::size_t lw = options_.local_window;
  const std::size_t modes = lambda_.size();
  if (dm.size() != n || residual.size() != n || out.size() != n) {
    throw std::invalid_argument("riemann_liouville: spans must have one entry per interval");
  }

  std::vector<double> hist(modes, 0.0);
  double s0 = 0.0, s1 = 0.0;
  out[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double* decay = &decay_[(i - 1) * modes];
    for (std::size_t l = 0; l < modes; ++l) hist[l] *= decay[l];
    if (i > lw) {
      const std::size_t j = i - lw - 1;
      const double* entry = &entry_[j * modes];
      for (std::size_t l = 0; l < modes; ++l) hist[l] += dm[j] * entry[l];
      s0 += dm[j];
      s1 += dm[j] * 0.5 * (g.node(j) + g.node(j + 1));
    }
    double far = 0.0;
    for (std::size_t l = 0; l < modes; ++l) far += mode_weight_[l] * hist[l];
    far += slow_constant_ * s0 - slow_linear_ * (g.node(i) * s0 - s1);

    double near = residual[i - 1];
    const double* w = &local_weights_[i * lw];
    for (std::size_t k = 0; k < lw && k < i; ++k) near += w[k] * dm[i - 1 - k];
    out[i] = far + near;
  }
}

void FractionalKernel::riemann_liouville_direct(std::span<const double> dm,
                                                std::span<const double> residual,
                                                std::span<double> out) const {
  const std::size_t n = grid_->intervals();
  if (dm.size() != n || residual.size() != n || out.size() != n) {
    throw std::invalid_argument("riemann_liouville_direct: spans must have one entry per interval");
  }
  out[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    double acc = residual[i - 1];
    for (std::size_t j = 0; j < i; ++j) acc += weight(i, j) * dm[j];
    out[i] = acc;
  }
}

Matrix riemann_liouville_process(const MartingalePath& m, const PathBundle& paths,
                                 const FractionalKernel& kernel, bool direct) {
  const std::size_t n = kernel.grid().intervals();
  if (m.grid->intervals() != n || paths.grid().intervals() != n || m.n_paths() != paths.n_paths()) {
    throw std::invalid_argument("riemann_liouville_process: grid or path count mismatch");
  }
  Matrix r(m.n_paths(), n);
  std::vector<double> dm(n), residual(n);
  for (std::size_t p = 0; p < m.n_paths(); ++p) {
    const auto mv = m.values.row(p);
    const auto sigma = m.integrand.row(p);
    const auto z = paths.auxiliary_normals(p, Stream::RiemannLiouvilleLocal);
    for (std::size_t j = 0; j < n; ++j) {
      dm[j] = mv[j + 1] - mv[j];
      residual[j] = sigma[j] * kernel.residual_sd(j) * z[j];
    }
    if (direct) {
      kernel.riemann_liouville_direct(dm, residual, r.row(p));
    } else {
      kernel.riemann_liouville(dm, residual, r.row(p));
    }
  }
  return r;
}

RateProcess fractional_rate(const MartingalePath& m, const PathBundle& paths,
                            const FractionalKernel& kernel) {
  RateProcess beta{m.grid, riemann_liouville_process(m, paths, kernel)};
  const std::size_t n = kernel.grid().intervals();
  for (std::size_t p = 0; p < beta.n_paths(); ++p) {
    auto b = beta.values.row(p);
    for (std::size_t i = 0; i < n; ++i) b[i] *= kernel.rate_factor(i);
  }
  return beta;
}

RateProcess fractional_rate(const MartingalePath& m, double alpha, const PathBundle& paths) {
  FractionalKernel kernel(m.grid, alpha);
  return fractional_rate(m, paths, kernel);
}

}  // namespace lebrep
