#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lebrep/grid.hpp"
#include "lebrep/matrix.hpp"
#include "lebrep/paths.hpp"
#include "lebrep/payoff.hpp"
#include "lebrep/rates.hpp"
#include "lebrep/reduce.hpp"

namespace lebrep {

// ---------------------------------------------------------------------------
// Truncation ladder
// ---------------------------------------------------------------------------

/// eps_k = T 2^-k for k = first_k .. last_k, with cutoff node c_k the last
/// node at or before T - eps_k.
struct Ladder {
  std::vector<int> k;
  std::vector<double> epsilon;
  std::vector<std::size_t> cutoff;

  std::size_t size() const { return k.size(); }
};

/// Deepest rung keeps at least `min_cells` grid cells inside [T - eps, T].
Ladder default_ladder(const TimeGrid& grid, int first_k = 3, std::size_t min_cells = 16);

/// Per-path truncated sums F_p(eps_k) = sum_{t_i <= T - eps_k} g_i dt_i of a
/// nonnegative node density g, together with the untruncated sum, the same
/// sum on the nested half grid, and the absolute mass (for round-off).
/// Paths occupy fixed slots, so batches may fill it concurrently.
class LadderSamples {
 public:
  LadderSamples(GridPtr grid, Ladder ladder, std::size_t n_paths);

  const TimeGrid& grid() const { return *grid_; }
  const Ladder& ladder() const { return ladder_; }
  std::size_t n_paths() const { return full_.size(); }

  /// `density` has one value per node t_i < T.
  void add_path(std::size_t p, std::span<const double> density);

  std::span<const double> rung(std::size_t p) const { return rungs_.row(p); }
  std::span<const double> full() const { return full_; }
  std::span<const double> coarse() const { return coarse_; }
  std::span<const double> mass() const { return mass_; }

 private:
  GridPtr grid_;
  Ladder ladder_;
  Matrix rungs_;
  std::vector<double> full_;
  std::vector<double> coarse_;
  std::vector<double> mass_;
};

enum class Verdict { Finite, Divergent, Inconclusive };

std::string verdict_name(Verdict v);

struct RungEstimate {
  double epsilon = 0.0;
  double value = 0.0;
  double se = 0.0;
};

struct NormEstimate {
  double p = 2.0;
  Estimate estimate;
  Verdict verdict = Verdict::Inconclusive;
};

struct RegularityReport {
  std::string functional;
  std::vector<RungEstimate> ladder;
  double slope = 0.0;       // over all rungs
  double tail_slope = 0.0;  // over the last three rungs
  double relative_increment = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  /// Untruncated grid sum. se combines Monte Carlo error, the fine/coarse
  /// grid discrepancy and accumulated round-off.
  Estimate limit;
  double mc_se = 0.0;
  double discretization = 0.0;
  std::optional<NormEstimate> l21;
  std::vector<NormEstimate> lp1;
  std::vector<std::pair<std::string, double>> extras;
};

constexpr double kDivergentSlope = 0.5;
constexpr double kFiniteSlope = 0.05;
constexpr double kFiniteIncrement = 0.01;

RegularityReport summarize_ladder(std::string functional, const LadderSamples& samples);

// ---------------------------------------------------------------------------
// Node densities of the regularity functionals
// ---------------------------------------------------------------------------

/// sigma_i^2 / (T - t_i), so that g_i dt_i = d<M>_i / (T - t_i).
void singular_density(const MartingalePath& m, std::size_t p, std::span<double> out);

/// |beta_i|^p.
void power_density(const RateProcess& beta, std::size_t p_index, double p, std::span<double> out);

/// g'(W_i)^2 / (T - t_i).
void gprime_density(TerminalG g, const PathBundle& paths, std::size_t p, std::span<double> out);

/// sqrt(sum_{j<i} d<M>_j / (T - t_j)^2).
void veraar_density(const MartingalePath& m, std::size_t p, std::span<double> out);

/// Validates p in [1, 2).
void check_lp_exponent(double p);

// ---------------------------------------------------------------------------
// Perturbations of the canonical rate
// ---------------------------------------------------------------------------

enum class Multiplier { TanhW, One, Zero };

/// gamma = chi / (s - t) on [t, s), -chi / (T - s) on [s, T), chi fixed at t.
struct PerturbationSpec {
  double t = 0.25;
  double s = 0.5;
  Multiplier chi = Multiplier::TanhW;
};

/// gamma on nodes t_i < T for one path. Pivots snap to the nearest nodes;
/// the result is recentred on its support so that sum gamma_i dt_i = 0.
void perturbation_path(const PerturbationSpec& spec, const PathBundle& paths, std::size_t p,
                       std::span<double> out);

/// Per-path samples for one perturbation: the first-order term
/// sum beta gamma du and the norm gaps for each step.
struct PerturbationSamples {
  PerturbationSpec spec;
  std::vector<double> steps;
  std::vector<double> inner;              // per path
  Matrix gaps;                            // n_paths x steps
};

PerturbationSamples make_perturbation_samples(const PerturbationSpec& spec,
                                              std::vector<double> steps, std::size_t n_paths);

/// Fills slots [first, first + beta.n_paths()).
void accumulate_perturbation(const RateProcess& beta, const PathBundle& paths,
                             PerturbationSamples& samples, std::size_t first);

struct OrthogonalityResult {
  PerturbationSpec spec;
  Estimate inner;
  double statistic = 0.0;
};

struct GapEstimate {
  double step = 0.0;
  Estimate gap;
};

struct MinimalityResult {
  PerturbationSpec spec;
  std::vector<GapEstimate> gaps;
  /// gap(2 eps) / gap(eps) for consecutive doubling steps where both gaps
  /// exceed 3 SE; NaN otherwise.
  std::vector<double> doubling_ratios;
};

OrthogonalityResult orthogonality_check(const PerturbationSamples& samples);
MinimalityResult minimality_check(const PerturbationSamples& samples);

/// Default ten pivots, all with t > 0 so that chi = tanh(W_t) is random.
std::vector<PerturbationSpec> default_perturbations(double horizon);

// ---------------------------------------------------------------------------
// Deterministic drift change
// ---------------------------------------------------------------------------

/// Z = exp(-sum theta dW - 1/2 sum theta^2 dt) per path.
void girsanov_weights(const PathBundle& paths, std::span<const double> theta, std::span<double> out);

struct GirsanovResult {
  Estimate plain;
  Estimate weighted;
  Estimate weights;
  double difference_z = 0.0;  // |plain - weighted| / combined SE
};

/// Compares the untruncated singular functional under P with its
/// importance-weighted counterpart.
GirsanovResult girsanov_invariance(const LadderSamples& singular, std::span<const double> weights);

}  // namespace lebrep
