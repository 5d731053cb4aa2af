#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lebrep/diagnostics.hpp"
#include "lebrep/payoff.hpp"
#include "lebrep/resolvent.hpp"

namespace lebrep {

inline constexpr const char* kVersion = "0.1.0";

enum class RepresentationKind { Canonical, Lebesgue, Volterra, Fractional };

struct RepresentationConfig {
  RepresentationKind kind = RepresentationKind::Canonical;
  std::optional<double> alpha;  // fractional, explicit
  std::optional<double> p;      // fractional, auto_from_p

  /// alpha for the fractional kind (explicit or 3/4 - 1/(2p)); NaN otherwise.
  double resolved_alpha() const;
};

struct GridConfig {
  double horizon = 1.0;
  std::size_t intervals = 16384;
  double grading = 2.0;
};

struct McConfig {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 20240611;
  std::size_t batch_size = 128;
};

struct DiagnosticOptions {
  std::vector<double> lp{1.5};
  double theta = 1.0;  // constant Girsanov drift
  std::vector<PerturbationSpec> perturbations;  // empty: default_perturbations(T)
  std::vector<double> steps{0.5, 1.0, 2.0};
  int resolvent_order = 10;
  std::size_t resolvent_nodes = 64;
  /// Grid whose first nodes carry the resolvent table; the run grid if unset.
  std::optional<GridConfig> resolvent_grid;
  /// Interval counts for the nested refinement study (each a power-of-two
  /// fraction of the largest).
  std::vector<std::size_t> refinement;
  /// Times at which the Riemann-Liouville variance is checked (fractions of T).
  std::vector<double> rl_times{0.25, 0.5, 0.75};
  /// Interior region for rate agreement: t <= T (1 - 2^-agreement_depth).
  int agreement_depth = 6;
};

struct SweepConfig {
  std::string parameter;
  std::vector<double> values;
};

struct OutputConfig {
  std::string directory = ".";
  bool csv = true;
  bool json = true;
  std::size_t rate_paths = 4;
};

struct ExperimentConfig {
  std::string name = "custom";
  PayoffSpec payoff = TimeAverage{};
  GridConfig grid;
  McConfig mc;
  RepresentationConfig representation;
  std::vector<std::string> diagnostics;
  DiagnosticOptions options;
  std::optional<SweepConfig> sweep;
  OutputConfig output;
};

/// Names accepted in the diagnostics list.
const std::vector<std::string>& check_names();

/// Strict parse: unknown keys, unknown names and out-of-range values throw
/// std::invalid_argument.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

std::vector<std::string> preset_names();
/// The bundled preset document, verbatim.
std::string preset_text(const std::string& name);
ExperimentConfig load_preset(const std::string& name);

// ---------------------------------------------------------------------------
// Ensemble run
// ---------------------------------------------------------------------------

struct ReproductionSummary {
  double rms_abs = 0.0;
  double rms_rel = 0.0;
  double sd_xi = 0.0;
  Estimate xi;
};

struct RefinementRow {
  std::size_t intervals = 0;
  double rms_abs = 0.0;
  double rms_rel = 0.0;
};

struct AgreementLevel {
  std::size_t intervals = 0;
  double t_max = 0.0;
  double max_lebesgue = 0.0;  // max |canonical - lebesgue form|
  double max_volterra = 0.0;  // max |canonical - volterra|
  double max_discrepancy = 0.0;
  double max_step = 0.0;      // max over paths of the one-step scale
  double worst_ratio = 0.0;   // max over paths of discrepancy / one-step scale
};

struct RlVarianceRow {
  double t = 0.0;
  double node = 0.0;
  double variance = 0.0;
  double target = 0.0;
  double relative_error = 0.0;
};

struct ResolventSummary {
  std::shared_ptr<const ResolventTable> table;
  double max_sum_error = 0.0;
  std::vector<double> composition_errors;  // i = 0 .. min(4, order)
  double max_bound_violation = 0.0;        // max(|S_m - 1/(T-s)| - bound), <= 0 when the bound holds
};

struct EnsembleResult {
  double alpha = 0.0;  // NaN unless fractional
  std::optional<ReproductionSummary> reproduction;
  std::vector<RefinementRow> refinement;
  std::vector<AgreementLevel> agreement;
  std::optional<RegularityReport> singular;
  std::optional<RegularityReport> l21;
  std::vector<RegularityReport> lp1;
  std::optional<RegularityReport> veraar;
  std::optional<RegularityReport> gprime;
  std::vector<OrthogonalityResult> orthogonality;
  std::vector<MinimalityResult> minimality;
  std::optional<GirsanovResult> girsanov;
  std::vector<RlVarianceRow> rl_variance;
  std::optional<ResolventSummary> resolvent;
  Matrix rate_rows;  // first output.rate_paths paths of the rate
};

/// Validates the combination of payoff, representation and checks.
void validate_config(const ExperimentConfig& c);

/// Runs every requested check in a single pass over path batches.
/// Results do not depend on `workers`.
EnsembleResult run_ensemble(const ExperimentConfig& c, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct RunContext {
  std::string command;
  std::optional<std::string> preset;
  unsigned workers = 1;
};

struct RunOutcome {
  std::vector<std::filesystem::path> files;  // excluding the manifest
  std::filesystem::path manifest;
  EnsembleResult result;                     // last ensemble (sweeps: last row)
};

RunOutcome run_represent(const ExperimentConfig& c, const RunContext& ctx);
RunOutcome run_diagnose(const ExperimentConfig& c, const RunContext& ctx);
RunOutcome run_sweep(const ExperimentConfig& c, const RunContext& ctx);

struct ReplayOutcome {
  RunOutcome run;
  std::vector<std::string> mismatched;  // files whose hash differs from the manifest
};

/// Re-runs the manifest's command and configuration into `out_dir` and
/// compares every output against the recorded hashes.
ReplayOutcome run_replay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir,
                         unsigned workers = 1);

/// Applies one sweep value to a copy of the configuration.
ExperimentConfig apply_sweep_value(const ExperimentConfig& c, const std::string& parameter, double value);

}  // namespace lebrep
