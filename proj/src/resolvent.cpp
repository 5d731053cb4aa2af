#include "lebrep/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lebrep {

ResolventTable::ResolventTable(double horizon, std::vector<double> nodes, int order, int refine)
    : horizon_(horizon), order_(order), nodes_(std::move(nodes)) {
  if (!(horizon > 0.0)) throw std::invalid_argument("resolvent: horizon must be positive");
  if (order < 0) throw std::invalid_argument("resolvent: order must be >= 0");
  if (refine < 1) throw std::invalid_argument("resolvent: refine must be >= 1");
  if (nodes_.empty()) throw std::invalid_argument("resolvent: no nodes");
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (!(nodes_[k] < horizon)) throw std::invalid_argument("resolvent: nodes must lie strictly below T");
    if (k > 0 && !(nodes_[k] > nodes_[k - 1])) {
      throw std::invalid_argument("resolvent: nodes must be strictly increasing");
    }
  }

  const std::size_t n = nodes_.size();
  const std::size_t terms = static_cast<std::size_t>(order) + 1;
  closed_.assign(terms, Matrix(n, n));
  numeric_.assign(terms, Matrix(n, n));
  sums_.assign(terms, Matrix(n, n));

  for (std::size_t a = 0; a < n; ++a) {
    const double inv_t = 1.0 / (horizon - nodes_[a]);
    for (std::size_t b = 0; b <= a; ++b) {
      const double l = std::log((horizon - nodes_[b]) / (horizon - nodes_[a]));
      double term = -inv_t;  // K^0
      double sum = 0.0;
      for (std::size_t i = 0; i < terms; ++i) {
        if (i > 0) term *= -l / static_cast<double>(i);
        closed_[i](a, b) = term;
        sum -= term;
        sums_[i](a, b) = sum;
      }
    }
  }

  // Compositions on a refined mesh, one column s = t_b at a time:
  // f_i(u) = -(T - u)^-1 int_s^u f_{i-1}, cumulative trapezoid.
  std::vector<double> mesh;
  std::vector<std::size_t> node_at;
  for (std::size_t k = 0; k < n; ++k) {
    node_at.push_back(mesh.size());
    mesh.push_back(nodes_[k]);
    if (k + 1 < n) {
      const double h = (nodes_[k + 1] - nodes_[k]) / refine;
      for (int r = 1; r < refine; ++r) mesh.push_back(nodes_[k] + r * h);
    }
  }
  std::vector<double> f, next;
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t start = node_at[b];
    const std::size_t len = mesh.size() - start;
    f.assign(len, 0.0);
    next.assign(len, 0.0);
    for (std::size_t u = 0; u < len; ++u) f[u] = -1.0 / (horizon - mesh[start + u]);
    for (std::size_t i = 0; i < terms; ++i) {
      if (i > 0) {
        double acc = 0.0;
        next[0] = 0.0;
        for (std::size_t u = 1; u < len; ++u) {
          acc += 0.5 * (f[u - 1] + f[u]) * (mesh[start + u] - mesh[start + u - 1]);
          next[u] = -acc / (horizon - mesh[start + u]);
        }
        std::swap(f, next);
      }
      for (std::size_t a = b; a < n; ++a) numeric_[i](a, b) = f[node_at[a] - start];
    }
  }
}

double ResolventTable::remainder_bound(int m, std::size_t a, std::size_t b) const {
  if (b > a) return 0.0;
  const double l = std::log((horizon_ - nodes_[b]) / (horizon_ - nodes_[a]));
  return std::pow(l, m + 1) / std::tgamma(m + 2.0) / (horizon_ - nodes_[a]);
}

double ResolventTable::max_sum_error(int m) const {
  if (m < 0 || m > order_) throw std::out_of_range("resolvent: order out of range");
  double worst = 0.0;
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      worst = std::max(worst, std::abs(sums_[m](a, b) - 1.0 / (horizon_ - nodes_[b])));
    }
  }
  return worst;
}

double ResolventTable::max_composition_error(int i) const {
  if (i < 0 || i > order_) throw std::out_of_range("resolvent: order out of range");
  double worst = 0.0;
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      worst = std::max(worst, std::abs(numeric_[i](a, b) - closed_[i](a, b)));
    }
  }
  return worst;
}

ResolventTable resolvent_table(const TimeGrid& grid, int order, std::size_t max_nodes) {
  const std::size_t count = std::min(max_nodes, grid.intervals());
  if (count == 0) throw std::invalid_argument("resolvent_table: need at least one node");
  const auto nodes = grid.nodes();
  return ResolventTable(grid.horizon(), std::vector<double>(nodes.begin(), nodes.begin() + count),
                        order);
}

}  // namespace lebrep
