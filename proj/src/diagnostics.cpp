#include "lebrep/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lebrep {

Ladder default_ladder(const TimeGrid& grid, int first_k, std::size_t min_cells) {
  const double horizon = grid.horizon();
  const std::size_t n = grid.intervals();
  const auto nodes = grid.nodes();
  Ladder ladder;
  for (int k = first_k; k < 1075; ++k) {
    const double eps = std::ldexp(horizon, -k);
    const double edge = horizon - eps;
    const auto first_inside = static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), edge) - nodes.begin());
    if (n - std::min(n, first_inside) < min_cells) break;
    ladder.k.push_back(k);
    ladder.epsilon.push_back(eps);
    ladder.cutoff.push_back(grid.last_node_at_or_before(edge));
  }
  if (ladder.size() < 3) {
    throw std::invalid_argument("default_ladder: grid too coarse for three rungs");
  }
  return ladder;
}

LadderSamples::LadderSamples(GridPtr grid, Ladder ladder, std::size_t n_paths)
    : grid_(std::move(grid)),
      ladder_(std::move(ladder)),
      rungs_(n_paths, ladder_.size()),
      full_(n_paths),
      coarse_(n_paths),
      mass_(n_paths) {}

void LadderSamples::add_path(std::size_t p, std::span<const double> density) {
  const TimeGrid& g = *grid_;
  const std::size_t n = g.intervals();
  if (density.size() != n) throw std::invalid_argument("LadderSamples: density size must equal N");
  if (p >= n_paths()) throw std::out_of_range("LadderSamples: path slot out of range");

  auto rung = rungs_.row(p);
  std::size_t next = 0;
  double acc = 0.0, abs_acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = density[i] * g.step(i);
    acc += f;
    abs_acc += std::abs(f);
    while (next < ladder_.size() && ladder_.cutoff[next] == i) rung[next++] = acc;
  }
  full_[p] = acc;
  mass_[p] = abs_acc;

  if (n % 2 == 0 && n >= 4) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; i += 2) c += density[i] * (g.node(i + 2) - g.node(i));
    coarse_[p] = c;
  } else {
    coarse_[p] = acc;
  }
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Finite: return "Finite";
    case Verdict::Divergent: return "Divergent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

RegularityReport summarize_ladder(std::string functional, const LadderSamples& samples) {
  const Ladder& ladder = samples.ladder();
  const std::size_t rungs = ladder.size();
  const std::size_t np = samples.n_paths();

  RegularityReport r;
  r.functional = std::move(functional);
  std::vector<double> column(np), x(rungs), y(rungs);
  for (std::size_t k = 0; k < rungs; ++k) {
    for (std::size_t p = 0; p < np; ++p) column[p] = samples.rung(p)[k];
    const Estimate e = mean_and_se(column);
    r.ladder.push_back({ladder.epsilon[k], e.mean, e.se});
    x[k] = -std::log(ladder.epsilon[k]);
    y[k] = e.mean;
  }
  r.slope = least_squares_slope(x, y);
  const std::size_t tail = std::min<std::size_t>(3, rungs);
  r.tail_slope = least_squares_slope(std::span(x).last(tail), std::span(y).last(tail));
  const double last = y[rungs - 1];
  const double diff = last - y[rungs - std::min<std::size_t>(3, rungs)];
  r.relative_increment = diff == 0.0 ? 0.0 : std::abs(diff) / std::abs(last);

  if (r.tail_slope > kDivergentSlope) {
    r.verdict = Verdict::Divergent;
  } else if (r.tail_slope < kFiniteSlope && r.relative_increment < kFiniteIncrement) {
    r.verdict = Verdict::Finite;
  } else {
    r.verdict = Verdict::Inconclusive;
  }

  const Estimate full = mean_and_se(samples.full());
  const double coarse = pairwise_sum(samples.coarse()) / static_cast<double>(np);
  const double mass = pairwise_sum(samples.mass()) / static_cast<double>(np);
  const double roundoff = std::log2(static_cast<double>(samples.grid().intervals())) *
                          std::numeric_limits<double>::epsilon() * mass;
  r.mc_se = full.se;
  r.discretization = std::abs(full.mean - coarse);
  r.limit.mean = full.mean;
  r.limit.se = std::sqrt(full.se * full.se + r.discretization * r.discretization +
                         roundoff * roundoff);
  return r;
}

void singular_density(const MartingalePath& m, std::size_t p, std::span<double> out) {
  const TimeGrid& g = *m.grid;
  const auto sigma = m.integrand.row(p);
  for (std::size_t i = 0; i < g.intervals(); ++i) out[i] = sigma[i] * sigma[i] / g.remaining(i);
}

void power_density(const RateProcess& beta, std::size_t p_index, double p, std::span<double> out) {
  const auto b = beta.path(p_index);
  if (p == 2.0) {
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i] * b[i];
  } else if (p == 1.0) {
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = std::abs(b[i]);
  } else {
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = std::pow(std::abs(b[i]), p);
  }
}

void gprime_density(TerminalG g, const PathBundle& paths, std::size_t p, std::span<double> out) {
  const TimeGrid& grid = paths.grid();
  const auto w = paths.values(p);
  for (std::size_t i = 0; i < grid.intervals(); ++i) {
    const double d = terminal_derivative(g, w[i]);
    out[i] = d * d / grid.remaining(i);
  }
}

void veraar_density(const MartingalePath& m, std::size_t p, std::span<double> out) {
  const TimeGrid& g = *m.grid;
  const auto qv = m.qv_increments.row(p);
  double inner = 0.0;
  for (std::size_t i = 0; i < g.intervals(); ++i) {
    out[i] = std::sqrt(inner);
    const double r = g.remaining(i);
    inner += qv[i] / (r * r);
  }
}

void check_lp_exponent(double p) {
  if (!(p >= 1.0 && p < 2.0)) throw std::invalid_argument("lp1_norm: p must lie in [1, 2)");
}

void perturbation_path(const PerturbationSpec& spec, const PathBundle& paths, std::size_t p,
                       std::span<double> out) {
  const TimeGrid& g = paths.grid();
  const std::size_t n = g.intervals();
  if (!(spec.t >= 0.0 && spec.t < spec.s && spec.s < g.horizon())) {
    throw std::invalid_argument("perturbation: need 0 <= t < s < T");
  }
  const std::size_t it = g.nearest_node(spec.t);
  const std::size_t is = g.nearest_node(spec.s);
  if (!(it < is && is < n)) throw std::invalid_argument("perturbation: pivots collapse on this grid");

  double chi = 0.0;
  switch (spec.chi) {
    case Multiplier::TanhW: chi = std::tanh(paths.values(p)[it]); break;
    case Multiplier::One: chi = 1.0; break;
    case Multiplier::Zero: chi = 0.0; break;
  }
  const double first = chi / (g.node(is) - g.node(it));
  const double second = -chi / g.remaining(is);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = i < it ? 0.0 : (i < is ? first : second);
    total += out[i] * g.step(i);
  }
  const double shift = total / g.remaining(it);
  for (std::size_t i = it; i < n; ++i) out[i] -= shift;
}

PerturbationSamples make_perturbation_samples(const PerturbationSpec& spec,
                                              std::vector<double> steps, std::size_t n_paths) {
  PerturbationSamples s;
  s.spec = spec;
  s.inner.assign(n_paths, 0.0);
  s.gaps = Matrix(n_paths, steps.size());
  s.steps = std::move(steps);
  return s;
}

void accumulate_perturbation(const RateProcess& beta, const PathBundle& paths,
                             PerturbationSamples& samples, std::size_t first) {
  const TimeGrid& g = paths.grid();
  const std::size_t n = g.intervals();
  std::vector<double> gamma(n);
  for (std::size_t p = 0; p < beta.n_paths(); ++p) {
    perturbation_path(samples.spec, paths, p, gamma);
    const auto b = beta.path(p);
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) inner += b[i] * gamma[i] * g.step(i);
    samples.inner[first + p] = inner;
    auto gaps = samples.gaps.row(first + p);
    for (std::size_t k = 0; k < samples.steps.size(); ++k) {
      const double eps = samples.steps[k];
      double gap = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double moved = b[i] + eps * gamma[i];
        gap += (moved * moved - b[i] * b[i]) * g.step(i);
      }
      gaps[k] = gap;
    }
  }
}

OrthogonalityResult orthogonality_check(const PerturbationSamples& samples) {
  OrthogonalityResult r;
  r.spec = samples.spec;
  r.inner = mean_and_se(samples.inner);
  if (r.inner.se > 0.0) {
    r.statistic = r.inner.mean / r.inner.se;
  } else if (r.inner.mean != 0.0) {
    r.statistic = std::copysign(std::numeric_limits<double>::infinity(), r.inner.mean);
  }
  return r;
}

MinimalityResult minimality_check(const PerturbationSamples& samples) {
  MinimalityResult r;
  r.spec = samples.spec;
  std::vector<double> column(samples.gaps.rows());
  for (std::size_t k = 0; k < samples.steps.size(); ++k) {
    for (std::size_t p = 0; p < column.size(); ++p) column[p] = samples.gaps(p, k);
    r.gaps.push_back({samples.steps[k], mean_and_se(column)});
  }
  for (std::size_t k = 0; k + 1 < r.gaps.size(); ++k) {
    const GapEstimate& a = r.gaps[k];
    const GapEstimate& b = r.gaps[k + 1];
    const bool doubling = b.step == 2.0 * a.step;
    const bool resolved = a.gap.mean > 3.0 * a.gap.se && b.gap.mean > 3.0 * b.gap.se;
    r.doubling_ratios.push_back(doubling && resolved ? b.gap.mean / a.gap.mean
                                                     : std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

std::vector<PerturbationSpec> default_perturbations(double horizon) {
  const double pivots[][2] = {{0.1, 0.3}, {0.2, 0.4}, {0.25, 0.5}, {0.3, 0.7}, {0.4, 0.6},
                              {0.5, 0.75}, {0.6, 0.9}, {0.1, 0.8}, {0.7, 0.95}, {0.15, 0.5}};
  std::vector<PerturbationSpec> out;
  for (const auto& pv : pivots) out.push_back({pv[0] * horizon, pv[1] * horizon, Multiplier::TanhW});
  return out;
}

void girsanov_weights(const PathBundle& paths, std::span<const double> theta, std::span<double> out) {
  const TimeGrid& g = paths.grid();
  const std::size_t n = g.intervals();
  if (theta.size() != n) throw std::invalid_argument("girsanov: theta needs one value per interval");
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    const auto dw = paths.increments(p);
    double drift = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      drift += theta[i] * dw[i];
      energy += theta[i] * theta[i] * g.step(i);
    }
    out[p] = std::exp(-drift - 0.5 * energy);
  }
}

GirsanovResult girsanov_invariance(const LadderSamples& singular, std::span<const double> weights) {
  const std::size_t np = singular.n_paths();
  if (weights.size() != np) throw std::invalid_argument("girsanov: one weight per path required");
  const RegularityReport base = summarize_ladder("singular", singular);
  const double extra = base.limit.se * base.limit.se - base.mc_se * base.mc_se;

  GirsanovResult r;
  r.plain = base.limit;
  std::vector<double> weighted(np);
  for (std::size_t p = 0; p < np; ++p) weighted[p] = weights[p] * singular.full()[p];
  r.weighted = mean_and_se(weighted);
  r.weighted.se = std::sqrt(r.weighted.se * r.weighted.se + std::max(0.0, extra));
  r.weights = mean_and_se(weights);
  const double scale = std::hypot(r.plain.se, r.weighted.se);
  const double diff = std::abs(r.plain.mean - r.weighted.mean);
  r.difference_z = diff == 0.0 ? 0.0 : (scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity());
  return r;
}

}  // namespace lebrep
