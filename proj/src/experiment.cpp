#include "lebrep/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lebrep/fractional.hpp"
#include "lebrep/rates.hpp"
#include "lebrep/reduce.hpp"

namespace lebrep {

namespace {

bool wants(const ExperimentConfig& c, const std::string& name) {
  return std::find(c.diagnostics.begin(), c.diagnostics.end(), name) != c.diagnostics.end();
}

bool is_pow2_multiple(std::size_t fine, std::size_t coarse) {
  if (coarse == 0 || fine % coarse != 0) return false;
  const std::size_t r = fine / coarse;
  return (r & (r - 1)) == 0;
}

// sigma^M is a known constant (for the Riemann-Liouville variance target).
std::optional<double> constant_integrand(const PayoffSpec& spec) {
  if (const auto* f = std::get_if<TerminalFunction>(&spec)) {
    if (f->g == TerminalG::Identity) return 1.0;
    if (f->g == TerminalG::Constant) return 0.0;
  }
  if (const auto* s = std::get_if<SigmaIntegral>(&spec)) {
    if (s->kind == SigmaKind::Constant) return s->value;
  }
  if (const auto* p = std::get_if<PowerSigma>(&spec)) {
    if (p->gamma == 0.0) return 1.0;
  }
  return std::nullopt;
}

RateProcess build_rate(const ExperimentConfig& c, const MartingalePath& m, const PathBundle& paths,
                       const FractionalKernel* kernel) {
  switch (c.representation.kind) {
    case RepresentationKind::Canonical: return canonical_rate(m, paths);
    case RepresentationKind::Lebesgue: return lebesgue_form_rate(m);
    case RepresentationKind::Volterra: return volterra_rate(m);
    case RepresentationKind::Fractional: return fractional_rate(m, paths, *kernel);
  }
  throw std::logic_error("unreachable representation");
}

double rms(std::span<const double> squares) {
  return std::sqrt(pairwise_sum(squares) / static_cast<double>(squares.size()));
}

ReproductionSummary reproduction_summary(std::span<const double> sq_err, std::span<const double> xi) {
  ReproductionSummary r;
  r.rms_abs = rms(sq_err);
  r.xi = mean_and_se(xi);
  r.sd_xi = std::sqrt(sample_variance(xi));
  r.rms_rel = r.sd_xi > 0.0 ? r.rms_abs / r.sd_xi
                            : (r.rms_abs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return r;
}

// Pathwise agreement of the three rate constructions on t <= t_max.
struct AgreementSlots {
  std::vector<double> leb, vol, disc, step, ratio;
  explicit AgreementSlots(std::size_t n) : leb(n), vol(n), disc(n), step(n), ratio(n) {}
};

void accumulate_agreement(const MartingalePath& m, const PathBundle& paths, double t_max,
                          AgreementSlots& slots, std::size_t first) {
  const RateProcess can = canonical_rate(m, paths);
  const RateProcess leb = lebesgue_form_rate(m);
  const RateProcess vol = volterra_rate(m);
  const TimeGrid& g = paths.grid();
  const std::size_t last = g.last_node_at_or_before(t_max);
  for (std::size_t p = 0; p < m.n_paths(); ++p) {
    const auto a = can.path(p), b = leb.path(p), v = vol.path(p);
    double dl = 0.0, dv = 0.0, d = 0.0, step = 0.0;
    for (std::size_t i = 0; i <= last; ++i) {
      dl = std::max(dl, std::abs(a[i] - b[i]));
      dv = std::max(dv, std::abs(a[i] - v[i]));
      d = std::max({d, std::abs(a[i] - b[i]), std::abs(a[i] - v[i]), std::abs(b[i] - v[i])});
      if (i < last) step = std::max(step, std::abs(a[i + 1] - a[i]));
    }
    slots.leb[first + p] = dl;
    slots.vol[first + p] = dv;
    slots.disc[first + p] = d;
    slots.step[first + p] = step;
    slots.ratio[first + p] = step > 0.0 ? d / step : (d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  }
}

AgreementLevel agreement_level(const AgreementSlots& s, std::size_t n, double t_max) {
  AgreementLevel l;
  l.intervals = n;
  l.t_max = t_max;
  l.max_lebesgue = *std::max_element(s.leb.begin(), s.leb.end());
  l.max_volterra = *std::max_element(s.vol.begin(), s.vol.end());
  l.max_discrepancy = *std::max_element(s.disc.begin(), s.disc.end());
  l.max_step = *std::max_element(s.step.begin(), s.step.end());
  l.worst_ratio = *std::max_element(s.ratio.begin(), s.ratio.end());
  return l;
}

NormEstimate norm_of(const RegularityReport& r, double p) { return {p, r.limit, r.verdict}; }

}  // namespace

void validate_config(const ExperimentConfig& c) {
  validate_payoff(c.payoff);
  if (c.grid.intervals < 2 || !(c.grid.horizon > 0.0) || !(c.grid.grading >= 1.0)) {
    throw std::invalid_argument("config: invalid grid");
  }
  if (c.representation.kind == RepresentationKind::Fractional) {
    check_fractional_alpha(c.representation.resolved_alpha());
    if (!has_bounded_integrand(c.payoff)) {
      throw std::invalid_argument(
          "config: the fractional representation needs a bounded martingale integrand (payoff '" +
          payoff_name(c.payoff) + "')");
    }
  }
  if ((wants(c, "orthogonality") || wants(c, "minimality")) &&
      c.representation.kind != RepresentationKind::Canonical) {
    throw std::invalid_argument("config: orthogonality and minimality apply to the canonical rate");
  }
  if (wants(c, "gprime") && !std::holds_alternative<TerminalFunction>(c.payoff)) {
    throw std::invalid_argument("config: gprime needs a terminal_function payoff");
  }
  if (wants(c, "girsanov") && !deterministic_integrand(c.payoff, build_grid(c.grid.horizon, 2, 1.0))) {
    throw std::invalid_argument("config: girsanov needs a deterministic martingale integrand");
  }
  if (wants(c, "rl_variance")) {
    if (c.representation.kind != RepresentationKind::Fractional) {
      throw std::invalid_argument("config: rl_variance needs the fractional representation");
    }
    if (!constant_integrand(c.payoff)) {
      throw std::invalid_argument("config: rl_variance needs a constant martingale integrand");
    }
    for (double t : c.options.rl_times) {
      if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("config: rl_times are fractions of T in (0, 1)");
    }
  }
  if (wants(c, "refinement")) {
    const auto& levels = c.options.refinement;
    if (levels.empty()) throw std::invalid_argument("config: refinement needs options.refinement levels");
    const std::size_t finest = *std::max_element(levels.begin(), levels.end());
    for (std::size_t n : levels) {
      if (!is_pow2_multiple(finest, n)) {
        throw std::invalid_argument("config: refinement levels must be nested dyadic coarsenings");
      }
    }
  }
  if (wants(c, "rate_agreement") && (c.grid.intervals % 2 != 0 || c.grid.intervals < 4)) {
    throw std::invalid_argument("config: rate_agreement needs an even N >= 4");
  }
  if (wants(c, "minimality") || wants(c, "orthogonality")) {
    for (double s : c.options.steps) {
      if (!std::isfinite(s)) throw std::invalid_argument("config: steps must be finite");
    }
  }
}

EnsembleResult run_ensemble(const ExperimentConfig& c, unsigned workers) {
  validate_config(c);
  const double horizon = c.grid.horizon;
  const auto grid = std::make_shared<const TimeGrid>(build_grid(horizon, c.grid.intervals, c.grid.grading));
  const std::size_t n = grid->intervals();
  const std::size_t np = c.mc.n_paths;

  EnsembleResult out;
  out.alpha = c.representation.resolved_alpha();

  const bool fractional = c.representation.kind == RepresentationKind::Fractional;
  std::unique_ptr<FractionalKernel> kernel;
  if (fractional) kernel = std::make_unique<FractionalKernel>(grid, out.alpha);

  const bool w_repro = wants(c, "reproduction"), w_refine = wants(c, "refinement"),
             w_agree = wants(c, "rate_agreement"), w_sing = wants(c, "singular_functional"),
             w_l21 = wants(c, "l21_norm"), w_lp = wants(c, "lp1_norm"), w_orth = wants(c, "orthogonality"),
             w_min = wants(c, "minimality"), w_ver = wants(c, "veraar"), w_gp = wants(c, "gprime"),
             w_gir = wants(c, "girsanov"), w_rl = wants(c, "rl_variance");
  const std::size_t rate_rows = std::min(c.output.rate_paths, np);
  const bool need_rate = w_repro || w_l21 || w_lp || w_orth || w_min || w_rl || rate_rows > 0;
  const bool need_paths = need_rate || w_refine || w_agree || w_sing || w_ver || w_gp || w_gir;

  if (wants(c, "resolvent")) {
    const GridConfig rg = c.options.resolvent_grid.value_or(c.grid);
    const TimeGrid rgrid = build_grid(rg.horizon, rg.intervals, rg.grading);
    auto table = std::make_shared<const ResolventTable>(
        resolvent_table(rgrid, c.options.resolvent_order, c.options.resolvent_nodes));
    ResolventSummary s;
    s.table = table;
    const int m = table->order();
    s.max_sum_error = table->max_sum_error(m);
    for (int i = 0; i <= std::min(4, m); ++i) s.composition_errors.push_back(table->max_composition_error(i));
    s.max_bound_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < table->size(); ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        const double err = std::abs(table->partial_sum(m, a, b) - 1.0 / (rg.horizon - table->nodes()[b]));
        s.max_bound_violation = std::max(s.max_bound_violation, err - table->remainder_bound(m, a, b));
      }
    }
    out.resolvent = s;
  }
  if (!need_paths) return out;

  const bool need_ladder = w_sing || w_gir || w_l21 || w_ver || w_gp || w_lp;
  const Ladder ladder = need_ladder ? default_ladder(*grid) : Ladder{};
  std::vector<double> sq_err(w_repro ? np : 0), xi(w_repro ? np : 0);

  // Refinement: paths are drawn on the finest level and coarsened in place.
  std::vector<std::size_t> levels = c.options.refinement;
  std::sort(levels.begin(), levels.end(), std::greater<>());
  std::vector<GridPtr> level_grids;
  std::vector<std::unique_ptr<FractionalKernel>> level_kernels;
  std::vector<std::vector<double>> level_err, level_xi;
  if (w_refine) {
    for (std::size_t ln : levels) {
      auto lg = std::make_shared<const TimeGrid>(build_grid(horizon, ln, c.grid.grading));
      level_kernels.push_back(fractional ? std::make_unique<FractionalKernel>(lg, out.alpha) : nullptr);
      level_grids.push_back(std::move(lg));
      level_err.emplace_back(np);
      level_xi.emplace_back(np);
    }
  }

  const double t_max = horizon * (1.0 - std::ldexp(1.0, -c.options.agreement_depth));
  std::optional<AgreementSlots> agree_fine, agree_coarse;
  if (w_agree) {
    agree_fine.emplace(np);
    agree_coarse.emplace(np);
  }

  std::optional<LadderSamples> sing, l21, ver, gp;
  std::vector<LadderSamples> lp;
  if (w_sing || w_gir) sing.emplace(grid, ladder, np);
  if (w_l21) l21.emplace(grid, ladder, np);
  if (w_ver) ver.emplace(grid, ladder, np);
  if (w_gp) gp.emplace(grid, ladder, np);
  if (w_lp) {
    for (std::size_t k = 0; k < c.options.lp.size(); ++k) lp.emplace_back(grid, ladder, np);
  }
  std::vector<double> gp_terminal(w_gp ? np : 0);

  std::vector<PerturbationSamples> perts;
  if (w_orth || w_min) {
    auto specs = c.options.perturbations.empty() ? default_perturbations(horizon) : c.options.perturbations;
    for (const auto& s : specs) perts.push_back(make_perturbation_samples(s, c.options.steps, np));
  }

  std::vector<double> theta(n, c.options.theta), weights(w_gir ? np : 0);

  std::vector<std::size_t> rl_nodes;
  for (double t : c.options.rl_times) rl_nodes.push_back(grid->nearest_node(t * horizon));
  Matrix rl_values(w_rl ? np : 0, rl_nodes.size());

  out.rate_rows = Matrix(rate_rows, n);

  for_each_batch(np, c.mc.batch_size, workers, [&](std::size_t first, std::size_t count) {
    const PathBundle paths = generate_paths(grid, count, c.mc.seed, first);
    const PayoffEvaluation ev = evaluate_payoff(c.payoff, paths);
    const MartingalePath& m = ev.martingale;
    std::vector<double> density(n);

    if (need_rate) {
      RateProcess beta{grid, Matrix()};
      if (fractional) {
        beta.values = riemann_liouville_process(m, paths, *kernel);
        for (std::size_t p = 0; p < count; ++p) {
          auto row = beta.values.row(p);
          if (w_rl) {
            for (std::size_t k = 0; k < rl_nodes.size(); ++k) rl_values(first + p, k) = row[rl_nodes[k]];
          }
          for (std::size_t i = 0; i < n; ++i) row[i] *= kernel->rate_factor(i);
        }
      } else {
        beta = build_rate(c, m, paths, nullptr);
      }

      if (w_repro) {
        const auto integral = integrate_rate(beta);
        for (std::size_t p = 0; p < count; ++p) {
          const double e = integral[p] - ev.terminal[p];
          sq_err[first + p] = e * e;
          xi[first + p] = ev.terminal[p];
        }
      }
      for (std::size_t p = 0; p < count; ++p) {
        if (first + p < rate_rows) {
          const auto row = beta.path(p);
          std::copy(row.begin(), row.end(), out.rate_rows.row(first + p).begin());
        }
        if (w_l21) {
          power_density(beta, p, 2.0, density);
          l21->add_path(first + p, density);
        }
        for (std::size_t k = 0; k < lp.size(); ++k) {
          power_density(beta, p, c.options.lp[k], density);
          lp[k].add_path(first + p, density);
        }
      }
      for (auto& s : perts) accumulate_perturbation(beta, paths, s, first);
    }

    for (std::size_t p = 0; p < count; ++p) {
      if (sing) {
        singular_density(m, p, density);
        sing->add_path(first + p, density);
      }
      if (ver) {
        veraar_density(m, p, density);
        ver->add_path(first + p, density);
      }
      if (gp) {
        const TerminalG g = std::get<TerminalFunction>(c.payoff).g;
        gprime_density(g, paths, p, density);
        gp->add_path(first + p, density);
        const double d = terminal_derivative(g, paths.values(p)[n]);
        gp_terminal[first + p] = d * d;
      }
    }
    if (w_gir) girsanov_weights(paths, theta, std::span(weights).subspan(first, count));

    if (w_agree) {
      accumulate_agreement(m, paths, t_max, *agree_fine, first);
      const PathBundle coarse = paths.coarsened();
      const PayoffEvaluation cev = evaluate_payoff(c.payoff, coarse);
      accumulate_agreement(cev.martingale, coarse, t_max, *agree_coarse, first);
    }

    if (w_refine) {
      std::optional<PathBundle> level_paths;
      for (std::size_t l = 0; l < levels.size(); ++l) {
        if (l == 0) {
          level_paths.emplace(levels[0] == n ? paths : generate_paths(level_grids[0], count, c.mc.seed, first));
        } else {
          for (std::size_t ln = levels[l - 1]; ln > levels[l]; ln /= 2) level_paths.emplace(level_paths->coarsened());
        }
        const PayoffEvaluation lev = evaluate_payoff(c.payoff, *level_paths);
        const RateProcess lb = build_rate(c, lev.martingale, *level_paths, level_kernels[l].get());
        const auto integral = integrate_rate(lb);
        for (std::size_t p = 0; p < count; ++p) {
          const double e = integral[p] - lev.terminal[p];
          level_err[l][first + p] = e * e;
          level_xi[l][first + p] = lev.terminal[p];
        }
      }
    }
  });

  if (w_repro) out.reproduction = reproduction_summary(sq_err, xi);
  if (w_refine) {
    for (std::size_t l = levels.size(); l-- > 0;) {
      const auto s = reproduction_summary(level_err[l], level_xi[l]);
      out.refinement.push_back({levels[l], s.rms_abs, s.rms_rel});
    }
  }
  if (w_agree) {
    out.agreement.push_back(agreement_level(*agree_coarse, n / 2, t_max));
    out.agreement.push_back(agreement_level(*agree_fine, n, t_max));
  }
  if (w_sing) out.singular = summarize_ladder("singular_functional", *sing);
  if (w_l21) {
    out.l21 = summarize_ladder("l21_norm", *l21);
    out.l21->l21 = norm_of(*out.l21, 2.0);
  }
  for (std::size_t k = 0; k < lp.size(); ++k) {
    RegularityReport r = summarize_ladder("lp1_norm", lp[k]);
    r.lp1.push_back(norm_of(r, c.options.lp[k]));
    out.lp1.push_back(std::move(r));
  }
  if (w_ver) out.veraar = summarize_ladder("veraar", *ver);
  if (w_gp) {
    out.gprime = summarize_ladder("gprime", *gp);
    const Estimate cmp = mean_and_se(gp_terminal);
    out.gprime->extras = {{"comparison", cmp.mean}, {"comparison_se", cmp.se}};
  }
  if (w_orth) {
    for (const auto& s : perts) out.orthogonality.push_back(orthogonality_check(s));
  }
  if (w_min) {
    for (const auto& s : perts) out.minimality.push_back(minimality_check(s));
  }
  if (w_gir) out.girsanov = girsanov_invariance(*sing, weights);
  if (w_rl) {
    const double sigma = *constant_integrand(c.payoff);
    std::vector<double> column(np);
    for (std::size_t k = 0; k < rl_nodes.size(); ++k) {
      for (std::size_t p = 0; p < np; ++p) column[p] = rl_values(p, k);
      RlVarianceRow row;
      row.t = c.options.rl_times[k] * horizon;
      row.node = grid->node(rl_nodes[k]);
      row.variance = sample_variance(column);
      row.target = sigma * sigma * std::pow(row.node, 1.0 - 2.0 * out.alpha) / (1.0 - 2.0 * out.alpha);
      row.relative_error = row.target > 0.0 ? row.variance / row.target - 1.0 : row.variance;
      out.rl_variance.push_back(row);
    }
  }
  return out;
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& c, const std::string& parameter, double value) {
  ExperimentConfig v = c;
  v.sweep.reset();
  if (parameter == "gamma") {
    if (!std::holds_alternative<PowerSigma>(v.payoff)) {
      throw std::invalid_argument("sweep: gamma needs a power_sigma payoff");
    }
    std::get<PowerSigma>(v.payoff).gamma = value;
  } else if (parameter == "alpha") {
    if (v.representation.kind != RepresentationKind::Fractional) {
      throw std::invalid_argument("sweep: alpha needs the fractional representation");
    }
    check_fractional_alpha(value);
    v.representation.alpha = value;
    v.representation.p.reset();
    // Middle of the window 1 < p < 1/(1 - alpha) where the L^{p,1} norm is finite.
    v.options.lp = {0.5 * (1.0 + 1.0 / (1.0 - value))};
  } else if (parameter == "p") {
    if (v.representation.kind != RepresentationKind::Fractional) {
      throw std::invalid_argument("sweep: p needs the fractional representation");
    }
    alpha_for_p(value);
    v.representation.p = value;
    v.representation.alpha.reset();
    v.options.lp = {value};
  } else if (parameter == "N") {
    if (!(value >= 2.0) || value != std::floor(value)) throw std::invalid_argument("sweep: N must be an integer >= 2");
    v.grid.intervals = static_cast<std::size_t>(value);
  } else {
    throw std::invalid_argument("sweep: unsupported parameter '" + parameter + "' (gamma, alpha, p, N)");
  }
  return v;
}

}  // namespace lebrep
