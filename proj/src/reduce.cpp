#include "lebrep/reduce.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lebrep/matrix.hpp"

namespace lebrep {

void Matrix::assign_rows(std::size_t first_row, const Matrix& block) {
  if (block.cols() != cols_ || first_row + block.rows() > rows_) {
    throw std::out_of_range("Matrix::assign_rows: block does not fit");
  }
  std::copy(block.data_.begin(), block.data_.end(), data_.begin() + first_row * cols_);
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate mean_and_se(std::span<const double> samples) {
  if (samples.empty()) return {};
  const double n = static_cast<double>(samples.size());
  Estimate e;
  e.mean = pairwise_sum(samples) / n;
  e.se = samples.size() > 1 ? std::sqrt(sample_variance(samples) / n) : 0.0;
  return e;
}

double sample_variance(std::span<const double> samples) {
  if (samples.size() < 2) return 0.0;
  const double n = static_cast<double>(samples.size());
  const double mean = pairwise_sum(samples) / n;
  std::vector<double> sq(samples.size());
  std::transform(samples.begin(), samples.end(), sq.begin(),
                 [mean](double x) { return (x - mean) * (x - mean); });
  return pairwise_sum(sq) / (n - 1.0);
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares_slope: need two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / n;
  const double my = pairwise_sum(y) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

void for_each_batch(std::size_t n_paths, std::size_t batch_size, unsigned workers,
                    const std::function<void(std::size_t, std::size_t)>& body) {
  if (batch_size == 0) throw std::invalid_argument("for_each_batch: batch size must be > 0");
  const std::size_t n_batches = (n_paths + batch_size - 1) / batch_size;
  auto run_batch = [&](std::size_t b) {
    const std::size_t first = b * batch_size;
    body(first, std::min(batch_size, n_paths - first));
  };

  workers = std::max(1u, workers);
  if (workers == 1 || n_batches <= 1) {
    for (std::size_t b = 0; b < n_batches; ++b) run_batch(b);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < n_batches; b = next++) {
        try {
          run_batch(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lebrep
