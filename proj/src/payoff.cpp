#include "lebrep/payoff.hpp"

#include <cmath>
#include <stdexcept>

namespace lebrep {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

double sigma_value(const SigmaIntegral& s, double t, double w) {
  switch (s.kind) {
    case SigmaKind::Constant: return s.value;
    case SigmaKind::Step: return t < s.cutoff ? s.value : 0.0;
    case SigmaKind::CosW: return std::cos(w);
  }
  return 0.0;
}

void fill_qv(MartingalePath& m) {
  const TimeGrid& grid = *m.grid;
  for (std::size_t p = 0; p < m.n_paths(); ++p) {
    const auto sigma = m.integrand.row(p);
    auto qv = m.qv_increments.row(p);
    for (std::size_t i = 0; i < grid.intervals(); ++i) qv[i] = sigma[i] * sigma[i] * grid.step(i);
  }
}

}  // namespace

std::string payoff_name(const PayoffSpec& spec) {
  return std::visit(
      Overloaded{
          [](const SigmaIntegral& s) -> std::string {
            switch (s.kind) {
              case SigmaKind::Constant: return "sigma_integral(constant)";
              case SigmaKind::Step: return "sigma_integral(step)";
              case SigmaKind::CosW: return "sigma_integral(cos_w)";
            }
            return "sigma_integral";
          },
          [](const PowerSigma&) -> std::string { return "power_sigma"; },
          [](const TimeAverage&) -> std::string { return "time_average"; },
          [](const TerminalFunction& f) -> std::string {
            switch (f.g) {
              case TerminalG::Identity: return "terminal_function(identity)";
              case TerminalG::SquareMinusT: return "terminal_function(square_minus_t)";
              case TerminalG::Constant: return "terminal_function(constant)";
            }
            return "terminal_function";
          },
      },
      spec);
}

void validate_payoff(const PayoffSpec& spec) {
  if (const auto* ps = std::get_if<PowerSigma>(&spec)) {
    if (!(ps->gamma > -0.5) || !std::isfinite(ps->gamma)) {
      throw std::invalid_argument("power_sigma: gamma must exceed -1/2 for a square-integrable xi");
    }
  }
  if (const auto* si = std::get_if<SigmaIntegral>(&spec)) {
    if (!std::isfinite(si->value) || !std::isfinite(si->cutoff)) {
      throw std::invalid_argument("sigma_integral: non-finite parameters");
    }
  }
}

bool has_bounded_integrand(const PayoffSpec& spec) {
  return std::visit(Overloaded{
                        [](const SigmaIntegral&) { return true; },
                        [](const PowerSigma& p) { return p.gamma >= 0.0; },
                        [](const TimeAverage&) { return true; },
                        [](const TerminalFunction& f) { return f.g != TerminalG::SquareMinusT; },
                    },
                    spec);
}

std::optional<std::vector<double>> deterministic_integrand(const PayoffSpec& spec,
                                                           const TimeGrid& grid) {
  const std::size_t n = grid.intervals();
  std::vector<double> sigma(n);
  const bool deterministic = std::visit(
      Overloaded{
          [&](const SigmaIntegral& s) {
            if (s.kind == SigmaKind::CosW) return false;
            for (std::size_t i = 0; i < n; ++i) sigma[i] = sigma_value(s, grid.node(i), 0.0);
            return true;
          },
          [&](const PowerSigma& ps) {
            for (std::size_t i = 0; i < n; ++i) sigma[i] = std::pow(grid.remaining(i), ps.gamma);
            return true;
          },
          [&](const TimeAverage&) {
            for (std::size_t i = 0; i < n; ++i) sigma[i] = grid.remaining(i);
            return true;
          },
          [&](const TerminalFunction& f) {
            if (f.g == TerminalG::SquareMinusT) return false;
            const double v = f.g == TerminalG::Identity ? 1.0 : 0.0;
            for (std::size_t i = 0; i < n; ++i) sigma[i] = v;
            return true;
          },
      },
      spec);
  if (!deterministic) return std::nullopt;
  return sigma;
}

double terminal_derivative(TerminalG g, double x) {
  switch (g) {
    case TerminalG::Identity: return 1.0;
    case TerminalG::SquareMinusT: return 2.0 * x;
    case TerminalG::Constant: return 0.0;
  }
  return 0.0;
}

Matrix ito_integral(const Matrix& integrand, const PathBundle& paths) {
  const std::size_t n = paths.grid().intervals();
  if (integrand.rows() != paths.n_paths() || integrand.cols() != n) {
    throw std::invalid_argument("ito_integral: integrand shape must be n_paths x N");
  }
  Matrix out(paths.n_paths(), n + 1);
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    const auto f = integrand.row(p);
    const auto dw = paths.increments(p);
    auto acc = out.row(p);
    acc[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc[i + 1] = acc[i] + f[i] * dw[i];
  }
  return out;
}

PayoffEvaluation evaluate_payoff(const PayoffSpec& spec, const PathBundle& paths) {
  validate_payoff(spec);
  const TimeGrid& grid = paths.grid();
  const std::size_t n = grid.intervals();
  const std::size_t np = paths.n_paths();
  const double horizon = grid.horizon();

  PayoffEvaluation out;
  MartingalePath& m = out.martingale;
  m.grid = paths.grid_ptr();
  m.integrand = Matrix(np, n);
  m.qv_increments = Matrix(np, n);

  auto from_integrand = [&] {
    m.values = ito_integral(m.integrand, paths);
  };

  std::visit(
      Overloaded{
          [&](const SigmaIntegral& s) {
            for (std::size_t p = 0; p < np; ++p) {
              const auto w = paths.values(p);
              auto sigma = m.integrand.row(p);
              for (std::size_t i = 0; i < n; ++i) sigma[i] = sigma_value(s, grid.node(i), w[i]);
            }
            from_integrand();
          },
          [&](const PowerSigma& ps) {
            std::vector<double> sigma(n);
            for (std::size_t i = 0; i < n; ++i) sigma[i] = std::pow(grid.remaining(i), ps.gamma);
            for (std::size_t p = 0; p < np; ++p) {
              auto row = m.integrand.row(p);
              std::copy(sigma.begin(), sigma.end(), row.begin());
            }
            from_integrand();
          },
          [&](const TimeAverage&) {
            // M_t = int_0^t W ds + W_t (T - t), with the running integral by
            // the trapezoid rule so that M is an exact discrete martingale.
            m.values = Matrix(np, n + 1);
            for (std::size_t p = 0; p < np; ++p) {
              const auto w = paths.values(p);
              auto sigma = m.integrand.row(p);
              auto mv = m.values.row(p);
              double running = 0.0;
              mv[0] = w[0] * horizon;
              for (std::size_t i = 0; i < n; ++i) {
                sigma[i] = grid.remaining(i);
                running += 0.5 * (w[i] + w[i + 1]) * grid.step(i);
                mv[i + 1] = running + w[i + 1] * grid.remaining(i + 1);
              }
            }
          },
          [&](const TerminalFunction& f) {
            m.values = Matrix(np, n + 1);
            for (std::size_t p = 0; p < np; ++p) {
              const auto w = paths.values(p);
              auto sigma = m.integrand.row(p);
              auto mv = m.values.row(p);
              for (std::size_t i = 0; i <= n; ++i) {
                switch (f.g) {
                  case TerminalG::Identity: mv[i] = w[i]; break;
                  case TerminalG::SquareMinusT: mv[i] = w[i] * w[i] - grid.node(i); break;
                  case TerminalG::Constant: mv[i] = f.value; break;
                }
                if (i < n) sigma[i] = terminal_derivative(f.g, w[i]);
              }
            }
          },
      },
      spec);

  fill_qv(m);
  out.terminal.resize(np);
  for (std::size_t p = 0; p < np; ++p) out.terminal[p] = m.values(p, n);
  return out;
}

}  // namespace lebrep
