#include "lebrep/paths.hpp"

#include <cmath>
#include <stdexcept>

namespace lebrep {

PathBundle::PathBundle(GridPtr grid, Matrix increments, std::uint64_t seed, std::size_t first_path)
    : grid_(std::move(grid)),
      seed_(seed),
      first_path_(first_path),
      increments_(std::move(increments)) {
  if (!grid_) throw std::invalid_argument("PathBundle: null grid");
  const std::size_t n = grid_->intervals();
  if (increments_.cols() != n) {
    throw std::invalid_argument("PathBundle: increments must have one column per interval");
  }
  values_ = Matrix(increments_.rows(), n + 1);
  for (std::size_t p = 0; p < increments_.rows(); ++p) {
    const auto dw = increments_.row(p);
    auto w = values_.row(p);
    w[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) w[i + 1] = w[i] + dw[i];
  }
}

std::vector<double> PathBundle::auxiliary_normals(std::size_t p, Stream stream) const {
  std::vector<double> z(grid_->intervals());
  fill_standard_normals(seed_, stream, first_path_ + p, z);
  return z;
}

PathBundle PathBundle::coarsened() const {
  auto coarse_grid = std::make_shared<const TimeGrid>(grid_->coarsened());
  const std::size_t nc = coarse_grid->intervals();
  Matrix dw(n_paths(), nc);
  for (std::size_t p = 0; p < n_paths(); ++p) {
    const auto fine = increments_.row(p);
    auto coarse = dw.row(p);
    for (std::size_t i = 0; i < nc; ++i) coarse[i] = fine[2 * i] + fine[2 * i + 1];
  }
  return PathBundle(std::move(coarse_grid), std::move(dw), seed_, first_path_);
}

PathBundle generate_paths(GridPtr grid, std::size_t n_paths, std::uint64_t seed,
                          std::size_t first_path) {
  if (n_paths < 1) throw std::invalid_argument("generate_paths: n_paths must be >= 1");
  if (!grid) throw std::invalid_argument("generate_paths: null grid");
  const std::size_t n = grid->intervals();
  std::vector<double> sd(n);
  for (std::size_t i = 0; i < n; ++i) sd[i] = std::sqrt(grid->step(i));

  Matrix dw(n_paths, n);
  for (std::size_t p = 0; p < n_paths; ++p) {
    auto row = dw.row(p);
    fill_standard_normals(seed, Stream::BrownianIncrements, first_path + p, row);
    for (std::size_t i = 0; i < n; ++i) row[i] *= sd[i];
  }
  return PathBundle(std::move(grid), std::move(dw), seed, first_path);
}

}  // namespace lebrep
