#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lebrep/grid.hpp"
#include "lebrep/matrix.hpp"
#include "lebrep/rng.hpp"

namespace lebrep {

using GridPtr = std::shared_ptr<const TimeGrid>;

/// A block of discrete Brownian paths on a shared grid.
///
/// Path p of the block is global path `first_path() + p`; its increments are
/// keyed on (seed, global path, step), so a block regenerated on its own is
/// bitwise identical to the same rows of a larger ensemble. Immutable once
/// built.
class PathBundle {
 public:
  /// Wraps explicit increments (row-major, n_paths x N).
  PathBundle(GridPtr grid, Matrix increments, std::uint64_t seed, std::size_t first_path = 0);

  const TimeGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t first_path() const { return first_path_; }
  std::size_t n_paths() const { return increments_.rows(); }

  std::span<const double> increments(std::size_t p) const { return increments_.row(p); }
  /// W on all N + 1 nodes, W[0] = 0.
  std::span<const double> values(std::size_t p) const { return values_.row(p); }

  const Matrix& increment_matrix() const { return increments_; }

  /// Standard normals from an auxiliary stream, one per interval,
  /// independent of the increments.
  std::vector<double> auxiliary_normals(std::size_t p, Stream stream) const;

  /// Same paths on the nested grid of every other node (pairs of increments
  /// are summed). Auxiliary streams of the result are keyed on the coarse
  /// steps.
  PathBundle coarsened() const;

 private:
  GridPtr grid_;
  std::uint64_t seed_;
  std::size_t first_path_;
  Matrix increments_;
  Matrix values_;
};

/// Paths [first_path, first_path + n_paths) of the ensemble keyed by `seed`.
PathBundle generate_paths(GridPtr grid, std::size_t n_paths, std::uint64_t seed,
                          std::size_t first_path = 0);

}  // namespace lebrep
