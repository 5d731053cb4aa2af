#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lebrep {

/// Order-fixed pairwise summation. The result depends only on the values
/// and their order, never on how the work producing them was partitioned.
double pairwise_sum(std::span<const double> values);

/// Sample mean with its Monte Carlo standard error.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

Estimate mean_and_se(std::span<const double> samples);

/// Unbiased sample variance (two-pass, pairwise sums).
double sample_variance(std::span<const double> samples);

/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Runs `body(first, count)` over consecutive path batches on `workers`
/// threads. Batches are disjoint, so bodies writing into per-path slots
/// produce results independent of the worker count and batch size.
void for_each_batch(std::size_t n_paths, std::size_t batch_size, unsigned workers,
                    const std::function<void(std::size_t first, std::size_t count)>& body);

}  // namespace lebrep
