#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lebrep/matrix.hpp"
#include "lebrep/paths.hpp"

namespace lebrep {

// ---------------------------------------------------------------------------
// Catalog of terminal variables with closed-form closing martingales.
// ---------------------------------------------------------------------------

enum class SigmaKind { Constant, Step, CosW };

/// xi = int_0^T sigma_u dW_u. Constant: sigma = value. Step: sigma = value
/// for t < cutoff and 0 afterwards. CosW: the adapted choice cos(W_t).
struct SigmaIntegral {
  SigmaKind kind = SigmaKind::Constant;
  double value = 1.0;
  double cutoff = 0.0;
};

/// xi = int_0^T (T - u)^gamma dW_u, gamma > -1/2.
struct PowerSigma {
  double gamma = 0.5;
};

/// xi = int_0^T W_t dt.
struct TimeAverage {};

enum class TerminalG { Identity, SquareMinusT, Constant };

/// xi = g(W_T) with g(x) = x, g(x) = x^2 - T, or g = value.
struct TerminalFunction {
  TerminalG g = TerminalG::Identity;
  double value = 0.0;
};

using PayoffSpec = std::variant<SigmaIntegral, PowerSigma, TimeAverage, TerminalFunction>;

std::string payoff_name(const PayoffSpec& spec);

/// Throws std::invalid_argument if the spec has no square-integrable closed form.
void validate_payoff(const PayoffSpec& spec);

/// True when the martingale integrand is bounded on [0, T].
bool has_bounded_integrand(const PayoffSpec& spec);

/// The integrand on nodes t_i < T when it is a deterministic function of time.
std::optional<std::vector<double>> deterministic_integrand(const PayoffSpec& spec,
                                                           const TimeGrid& grid);

/// g'(x) for the catalog terminal functions.
double terminal_derivative(TerminalG g, double x);

/// Closing martingale M_t = E[xi | F_t] on all nodes, its integrand sigma^M
/// on nodes t_i < T (dM = sigma^M dW), and the quadratic-variation
/// increments (sigma^M_i)^2 (t_{i+1} - t_i).
struct MartingalePath {
  GridPtr grid;
  Matrix values;      // n_paths x (N + 1)
  Matrix integrand;   // n_paths x N
  Matrix qv_increments;  // n_paths x N

  std::size_t n_paths() const { return values.rows(); }
};

struct PayoffEvaluation {
  std::vector<double> terminal;  // xi per path
  MartingalePath martingale;
};

PayoffEvaluation evaluate_payoff(const PayoffSpec& spec, const PathBundle& paths);

/// Left-point Ito sums sum_{j<k} f_j dW_j on all nodes; never reads the
/// integrand at t_N = T. `integrand` is n_paths x N.
Matrix ito_integral(const Matrix& integrand, const PathBundle& paths);

}  // namespace lebrep
