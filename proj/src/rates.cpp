#include "lebrep/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace lebrep {

namespace {

void check_same_grid(const MartingalePath& m, const PathBundle& paths) {
  if (m.grid->nodes().size() != paths.grid().nodes().size()) {
    throw std::invalid_argument("martingale and paths live on different grids");
  }
  if (m.n_paths() != paths.n_paths()) {
    throw std::invalid_argument("martingale and paths have different path counts");
  }
}

}  // namespace

RateProcess canonical_rate(const MartingalePath& m, const PathBundle& paths) {
  check_same_grid(m, paths);
  const TimeGrid& grid = *m.grid;
  const std::size_t n = grid.intervals();
  const double horizon = grid.horizon();

  std::vector<double> inv_remaining(n);
  for (std::size_t i = 0; i < n; ++i) inv_remaining[i] = 1.0 / grid.remaining(i);

  RateProcess beta{m.grid, Matrix(m.n_paths(), n)};
  for (std::size_t p = 0; p < m.n_paths(); ++p) {
    const auto sigma = m.integrand.row(p);
    const auto dw = paths.increments(p);
    auto b = beta.values.row(p);
    double acc = m.values(p, 0) / horizon;
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = acc;
      acc += sigma[i] * dw[i] * inv_remaining[i];
    }
  }
  return beta;
}

RateProcess lebesgue_form_rate(const MartingalePath& m) {
  const TimeGrid& grid = *m.grid;
  const std::size_t n = grid.intervals();
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.remaining(i);
    weight[i] = grid.step(i) / (r * r);
  }

  RateProcess beta{m.grid, Matrix(m.n_paths(), n)};
  for (std::size_t p = 0; p < m.n_paths(); ++p) {
    const auto mv = m.values.row(p);
    auto b = beta.values.row(p);
    double drift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = mv[i] / grid.remaining(i) - drift;
      drift += mv[i] * weight[i];
    }
  }
  return beta;
}

RateProcess volterra_rate(const MartingalePath& m) {
  const TimeGrid& grid = *m.grid;
  const std::size_t n = grid.intervals();
  RateProcess beta{m.grid, Matrix(m.n_paths(), n)};
  for (std::size_t p = 0; p < m.n_paths(); ++p) {
    const auto mv = m.values.row(p);
    auto b = beta.values.row(p);
    double integrated = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = (mv[i] - integrated) / grid.remaining(i);
      integrated += b[i] * grid.step(i);
    }
  }
  return beta;
}

std::vector<double> integrate_rate(const RateProcess& beta) {
  const TimeGrid& grid = *beta.grid;
  std::vector<double> out(beta.n_paths());
  for (std::size_t p = 0; p < beta.n_paths(); ++p) {
    const auto b = beta.path(p);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.intervals(); ++i) acc += b[i] * grid.step(i);
    out[p] = acc;
  }
  return out;
}

double alpha_for_p(double p) {
  if (!(p > 1.0 && p < 2.0)) {
    throw std::invalid_argument("alpha_for_p: p must lie in (1, 2)");
  }
  return 0.75 - 0.5 / p;
}

}  // namespace lebrep
