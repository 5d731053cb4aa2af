// lebrep: command-line runner for the representation experiments.
#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lebrep/experiment.hpp"
#include "lebrep/report_io.hpp"

using namespace lebrep;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::string grid;
  unsigned workers = 1;
  std::string param;
  std::string values;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "experiment configuration (JSON)");
  cmd->add_option("--preset", o.preset, "bundled preset name");
  cmd->add_option("--out", o.out, "existing output directory");
  cmd->add_option("--seed", o.seed, "override mc.seed");
  cmd->add_option("--paths", o.paths, "override mc.n_paths");
  cmd->add_option("--grid", o.grid, "override grid as N,q");
  cmd->add_option("--workers", o.workers, "worker threads (outputs do not depend on it)")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(CLI::App* cmd, const CommonOptions& o) {
  if (o.config_path.empty() == o.preset.empty()) {
    throw std::invalid_argument("give exactly one of --config and --preset");
  }
  ExperimentConfig c = o.preset.empty() ? parse_config(nlohmann::json::parse(read_text(o.config_path)))
                                        : load_preset(o.preset);
  if (cmd->count("--seed")) c.mc.seed = o.seed;
  if (cmd->count("--paths")) {
    if (o.paths < 1) throw std::invalid_argument("--paths must be >= 1");
    c.mc.n_paths = o.paths;
  }
  if (cmd->count("--grid")) {
    std::size_t n = 0;
    double q = 0.0;
    char comma = 0;
    std::istringstream ss(o.grid);
    if (!(ss >> n >> comma >> q) || comma != ',' || !ss.eof()) {
      throw std::invalid_argument("--grid expects N,q (e.g. 16384,2)");
    }
    c.grid.intervals = n;
    c.grid.grading = q;
    if (n < 2 || q < 1.0) throw std::invalid_argument("--grid needs N >= 2 and q >= 1");
  }
  if (cmd->count("--out")) c.output.directory = o.out;
  return c;
}

void report(const RunOutcome& r) {
  const EnsembleResult& e = r.result;
  if (e.reproduction) {
    std::printf("reproduction: rms %.6g, relative to sd(xi) %.6g\n", e.reproduction->rms_abs, e.reproduction->rms_rel);
  }
  for (const auto& row : e.refinement) std::printf("refinement N=%zu: relative rms %.6g\n", row.intervals, row.rms_rel);
  auto ladder = [](const char* name, const std::optional<RegularityReport>& rep) {
    if (rep) {
      std::printf("%s: slope %.4f, tail slope %.4f, verdict %s, limit %.6g +- %.2g\n", name, rep->slope,
                  rep->tail_slope, verdict_name(rep->verdict).c_str(), rep->limit.mean, rep->limit.se);
    }
  };
  ladder("singular_functional", e.singular);
  ladder("l21_norm", e.l21);
  for (const auto& rep : e.lp1) ladder("lp1_norm", rep);
  ladder("veraar", e.veraar);
  ladder("gprime", e.gprime);
  if (e.resolvent) std::printf("resolvent: max |S_m - 1/(T-s)| = %.3g\n", e.resolvent->max_sum_error);
  for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
  std::printf("wrote %s\n", r.manifest.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adapted Lebesgue-integral representations: simulation and diagnostics"};
  app.require_subcommand(1);

  CommonOptions rep_o, diag_o, sweep_o;
  auto* represent = app.add_subcommand("represent", "build a rate process and write rates, checks and a manifest");
  add_common(represent, rep_o);
  auto* diagnose = app.add_subcommand("diagnose", "run the configured checks and write reports");
  add_common(diagnose, diag_o);
  auto* sweep = app.add_subcommand("sweep", "repeat the checks over one parameter");
  add_common(sweep, sweep_o);
  sweep->add_option("--param", sweep_o.param, "gamma, alpha, p or N (overrides the config's sweep)");
  sweep->add_option("--values", sweep_o.values, "comma-separated values; empty for a header-only table");

  std::string manifest, replay_out;
  unsigned replay_workers = 1;
  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare outputs bitwise");
  replay->add_option("manifest", manifest, "manifest.json of an earlier run")->required();
  replay->add_option("--out", replay_out, "existing output directory")->required();
  replay->add_option("--workers", replay_workers, "worker threads")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("presets", "list bundled presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& name : preset_names()) std::printf("%s\n", name.c_str());
      return 0;
    }
    if (replay->parsed()) {
      const ReplayOutcome r = run_replay(manifest, replay_out, replay_workers);
      report(r.run);
      if (!r.mismatched.empty()) {
        for (const auto& f : r.mismatched) std::fprintf(stderr, "replay mismatch: %s\n", f.c_str());
        return 3;
      }
      std::printf("replay: all outputs identical\n");
      return 0;
    }

    CLI::App* cmd = represent->parsed() ? represent : (diagnose->parsed() ? diagnose : sweep);
    const CommonOptions& o = represent->parsed() ? rep_o : (diagnose->parsed() ? diag_o : sweep_o);
    ExperimentConfig c = resolve(cmd, o);
    RunContext ctx;
    ctx.command = cmd->get_name();
    if (!o.preset.empty()) ctx.preset = o.preset;
    ctx.workers = o.workers;

    RunOutcome r;
    if (cmd == represent) {
      r = run_represent(c, ctx);
    } else if (cmd == diagnose) {
      r = run_diagnose(c, ctx);
    } else {
      if (sweep->count("--param") || sweep->count("--values")) {
        SweepConfig s = c.sweep.value_or(SweepConfig{});
        if (sweep->count("--param")) s.parameter = sweep_o.param;
        if (sweep->count("--values")) {
          s.values.clear();
          std::stringstream ss(sweep_o.values);
          std::string item;
          while (std::getline(ss, item, ',')) {
            if (!item.empty()) s.values.push_back(std::stod(item));
          }
        }
        c.sweep = s;
      }
      r = run_sweep(c, ctx);
    }
    report(r);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
