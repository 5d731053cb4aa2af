#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lebrep/experiment.hpp"
#include "lebrep/report_io.hpp"

namespace lebrep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool wants(const ExperimentConfig& c, const std::string& name) {
  return std::find(c.diagnostics.begin(), c.diagnostics.end(), name) != c.diagnostics.end();
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

fs::path checked_directory(const ExperimentConfig& c) {
  const fs::path dir(c.output.directory);
  if (!fs::is_directory(dir)) throw std::runtime_error("output directory does not exist: " + dir.string());
  return dir;
}

class Writer {
 public:
  Writer(fs::path dir, const OutputConfig& o) : dir_(std::move(dir)), csv_(o.csv), json_(o.json) {}

  void csv(const std::string& name, const CsvTable& t) {
    if (csv_) put(name, t.str());
  }
  void json_doc(const std::string& name, const json& j) {
    if (json_) put(name, j.dump(2) + "\n");
  }
  std::vector<fs::path> files() const { return files_; }

 private:
  void put(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    files_.push_back(dir_ / name);
  }
  fs::path dir_;
  bool csv_, json_;
  std::vector<fs::path> files_;
};

void write_report(Writer& w, const std::string& stem, const RegularityReport& r) {
  w.json_doc(stem + ".json", to_json(r));
  w.csv(stem + "_ladder.csv", ladder_csv(r));
}

json reproduction_json(const ReproductionSummary& r, std::size_t n_paths, std::size_t n) {
  return {{"rms_abs", r.rms_abs}, {"rms_rel", r.rms_rel}, {"sd_xi", r.sd_xi}, {"xi_mean", r.xi.mean},
          {"xi_se", r.xi.se},     {"n_paths", n_paths},   {"N", n}};
}

std::vector<fs::path> write_results(const EnsembleResult& r, const ExperimentConfig& c, const fs::path& dir,
                                    bool rates) {
  Writer w(dir, c.output);
  if (rates) {
    const auto grid = build_grid(c.grid.horizon, c.grid.intervals, c.grid.grading);
    CsvTable t({"path", "t", "beta"});
    for (std::size_t p = 0; p < r.rate_rows.rows(); ++p) {
      for (std::size_t i = 0; i < r.rate_rows.cols(); ++i) {
        t.add_row({std::to_string(p), csv_number(grid.node(i)), csv_number(r.rate_rows(p, i))});
      }
    }
    w.csv("rates.csv", t);
  }
  if (r.reproduction) {
    const auto& s = *r.reproduction;
    w.json_doc("reproduction.json", reproduction_json(s, c.mc.n_paths, c.grid.intervals));
    CsvTable t({"N", "rms_abs", "rms_rel", "sd_xi"});
    t.add_row({std::to_string(c.grid.intervals), csv_number(s.rms_abs), csv_number(s.rms_rel), csv_number(s.sd_xi)});
    w.csv("reproduction.csv", t);
  }
  if (!r.refinement.empty()) {
    CsvTable t({"N", "rms_abs", "rms_rel"});
    json j = json::array();
    for (const auto& row : r.refinement) {
      t.add_row({std::to_string(row.intervals), csv_number(row.rms_abs), csv_number(row.rms_rel)});
      j.push_back({{"N", row.intervals}, {"rms_abs", row.rms_abs}, {"rms_rel", row.rms_rel}});
    }
    w.csv("refinement.csv", t);
    w.json_doc("refinement.json", {{"levels", j}});
  }
  if (!r.agreement.empty()) {
    CsvTable t({"N", "t_max", "max_lebesgue", "max_volterra", "max_discrepancy", "max_step", "worst_ratio"});
    json j = json::array();
    for (const auto& a : r.agreement) {
      t.add_row({std::to_string(a.intervals), csv_number(a.t_max), csv_number(a.max_lebesgue),
                 csv_number(a.max_volterra), csv_number(a.max_discrepancy), csv_number(a.max_step),
                 csv_number(a.worst_ratio)});
      j.push_back({{"N", a.intervals}, {"t_max", a.t_max}, {"max_lebesgue", a.max_lebesgue},
                   {"max_volterra", a.max_volterra}, {"max_discrepancy", a.max_discrepancy},
                   {"max_step", a.max_step}, {"worst_ratio", a.worst_ratio}});
    }
    w.csv("rate_agreement.csv", t);
    w.json_doc("rate_agreement.json", {{"levels", j}});
  }
  if (r.singular) write_report(w, "singular_functional", *r.singular);
  if (r.l21) write_report(w, "l21_norm", *r.l21);
  for (const auto& rep : r.lp1) write_report(w, "lp1_norm_p" + short_number(rep.lp1.front().p), rep);
  if (r.veraar) write_report(w, "veraar", *r.veraar);
  if (r.gprime) write_report(w, "gprime", *r.gprime);
  if (!r.orthogonality.empty()) {
    CsvTable t({"t", "s", "inner", "se", "statistic"});
    json j = json::array();
    for (const auto& o : r.orthogonality) {
      t.add_row({csv_number(o.spec.t), csv_number(o.spec.s), csv_number(o.inner.mean), csv_number(o.inner.se),
                 csv_number(o.statistic)});
      j.push_back(to_json(o));
    }
    w.csv("orthogonality.csv", t);
    w.json_doc("orthogonality.json", {{"perturbations", j}});
  }
  if (!r.minimality.empty()) {
    CsvTable t({"t", "s", "step", "gap", "se", "ratio_to_previous"});
    json j = json::array();
    for (const auto& m : r.minimality) {
      for (std::size_t k = 0; k < m.gaps.size(); ++k) {
        const double ratio = k == 0 ? std::nan("") : m.doubling_ratios[k - 1];
        t.add_row({csv_number(m.spec.t), csv_number(m.spec.s), csv_number(m.gaps[k].step),
                   csv_number(m.gaps[k].gap.mean), csv_number(m.gaps[k].gap.se), csv_number(ratio)});
      }
      j.push_back(to_json(m));
    }
    w.csv("minimality.csv", t);
    w.json_doc("minimality.json", {{"perturbations", j}});
  }
  if (r.girsanov) {
    const auto& g = *r.girsanov;
    CsvTable t({"plain", "plain_se", "weighted", "weighted_se", "weight_mean", "weight_se", "difference_z"});
    t.add_row({csv_number(g.plain.mean), csv_number(g.plain.se), csv_number(g.weighted.mean),
               csv_number(g.weighted.se), csv_number(g.weights.mean), csv_number(g.weights.se),
               csv_number(g.difference_z)});
    w.csv("girsanov.csv", t);
    w.json_doc("girsanov.json", to_json(g));
  }
  if (!r.rl_variance.empty()) {
    CsvTable t({"t", "node", "variance", "target", "relative_error"});
    json j = json::array();
    for (const auto& row : r.rl_variance) {
      t.add_row({csv_number(row.t), csv_number(row.node), csv_number(row.variance), csv_number(row.target),
                 csv_number(row.relative_error)});
      j.push_back({{"t", row.t}, {"node", row.node}, {"variance", row.variance}, {"target", row.target},
                   {"relative_error", row.relative_error}});
    }
    w.csv("rl_variance.csv", t);
    w.json_doc("rl_variance.json", {{"alpha", r.alpha}, {"rows", j}});
  }
  if (r.resolvent) {
    const auto& s = *r.resolvent;
    w.csv("resolvent.csv", resolvent_csv(*s.table));
    w.json_doc("resolvent.json", {{"order", s.table->order()},
                                  {"nodes", s.table->size()},
                                  {"max_sum_error", s.max_sum_error},
                                  {"composition_errors", s.composition_errors},
                                  {"max_bound_violation", s.max_bound_violation}});
  }
  return w.files();
}

fs::path write_manifest(const ExperimentConfig& c, const RunContext& ctx, const EnsembleResult& r,
                        const fs::path& dir, const std::vector<fs::path>& files) {
  json config = config_to_json(c);
  config["output"].erase("directory");
  json m;
  m["tool"] = "lebrep";
  m["version"] = kVersion;
  m["command"] = ctx.command;
  m["preset"] = ctx.preset ? json(*ctx.preset) : json(nullptr);
  m["config_hash"] = hex64(fnv1a(config.dump()));
  m["seed"] = c.mc.seed;
  m["grid"] = {{"T", c.grid.horizon}, {"N", c.grid.intervals}, {"q", c.grid.grading}};
  json resolved = json::object();
  if (c.representation.kind == RepresentationKind::Fractional) resolved["alpha"] = r.alpha;
  m["resolved"] = resolved;
  m["config"] = config;
  json outputs = json::array();
  for (const auto& f : files) {
    outputs.push_back({{"file", f.filename().string()}, {"fnv1a", hex64(fnv1a(read_text(f)))}});
  }
  m["outputs"] = outputs;
  const fs::path path = dir / "manifest.json";
  write_text(path, m.dump(2) + "\n");
  return path;
}

// Fixed summary columns for one ensemble, chosen from the configuration only.
std::vector<std::string> summary_header(const ExperimentConfig& c) {
  std::vector<std::string> h;
  if (c.representation.kind == RepresentationKind::Fractional) h.insert(h.end(), {"alpha", "p_max"});
  if (wants(c, "reproduction")) h.insert(h.end(), {"rms_abs", "rms_rel"});
  if (wants(c, "rate_agreement")) h.insert(h.end(), {"max_discrepancy", "worst_ratio"});
  if (wants(c, "singular_functional")) {
    h.insert(h.end(), {"sf_slope", "sf_tail_slope", "sf_verdict", "sf_limit", "sf_limit_se"});
  }
  if (wants(c, "l21_norm")) h.insert(h.end(), {"l21_verdict", "l21_tail_slope", "l21_limit"});
  if (wants(c, "lp1_norm")) {
    for (std::size_t k = 0; k < c.options.lp.size(); ++k) {
      const std::string s = std::to_string(k);
      h.insert(h.end(), {"lp" + s + "_p", "lp" + s + "_verdict", "lp" + s + "_tail_slope", "lp" + s + "_limit"});
    }
  }
  if (wants(c, "veraar")) h.insert(h.end(), {"veraar_mean", "veraar_verdict"});
  if (wants(c, "gprime")) h.insert(h.end(), {"gprime_slope", "gprime_comparison"});
  if (wants(c, "orthogonality")) h.insert(h.end(), {"orth_max_abs_statistic"});
  if (wants(c, "minimality")) h.insert(h.end(), {"min_worst_gap_z"});
  if (wants(c, "girsanov")) h.insert(h.end(), {"gir_plain", "gir_weighted", "gir_difference_z", "gir_weight_mean"});
  if (wants(c, "rl_variance")) {
    for (double t : c.options.rl_times) h.push_back("rl_relerr_t" + short_number(t));
  }
  if (wants(c, "resolvent")) h.insert(h.end(), {"resolvent_max_sum_error"});
  return h;
}

std::vector<std::string> summary_row(const ExperimentConfig& c, const EnsembleResult& r) {
  std::vector<std::string> row;
  auto num = [&](double v) { row.push_back(csv_number(v)); };
  if (c.representation.kind == RepresentationKind::Fractional) {
    num(r.alpha);
    num(1.0 / (1.0 - r.alpha));
  }
  if (r.reproduction) {
    num(r.reproduction->rms_abs);
    num(r.reproduction->rms_rel);
  }
  if (!r.agreement.empty()) {
    num(r.agreement.back().max_discrepancy);
    num(r.agreement.back().worst_ratio);
  }
  if (r.singular) {
    num(r.singular->slope);
    num(r.singular->tail_slope);
    row.push_back(verdict_name(r.singular->verdict));
    num(r.singular->limit.mean);
    num(r.singular->limit.se);
  }
  if (r.l21) {
    row.push_back(verdict_name(r.l21->verdict));
    num(r.l21->tail_slope);
    num(r.l21->limit.mean);
  }
  for (const auto& rep : r.lp1) {
    num(rep.lp1.front().p);
    row.push_back(verdict_name(rep.verdict));
    num(rep.tail_slope);
    num(rep.limit.mean);
  }
  if (r.veraar) {
    num(r.veraar->limit.mean);
    row.push_back(verdict_name(r.veraar->verdict));
  }
  if (r.gprime) {
    num(r.gprime->slope);
    num(r.gprime->extras.front().second);
  }
  if (!r.orthogonality.empty()) {
    double worst = 0.0;
    for (const auto& o : r.orthogonality) worst = std::max(worst, std::abs(o.statistic));
    num(worst);
  }
  if (!r.minimality.empty()) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& m : r.minimality) {
      for (const auto& g : m.gaps) {
        if (g.gap.se > 0.0) worst = std::min(worst, g.gap.mean / g.gap.se);
      }
    }
    num(worst);
  }
  if (r.girsanov) {
    num(r.girsanov->plain.mean);
    num(r.girsanov->weighted.mean);
    num(r.girsanov->difference_z);
    num(r.girsanov->weights.mean);
  }
  for (const auto& rl : r.rl_variance) num(rl.relative_error);
  if (r.resolvent) num(r.resolvent->max_sum_error);
  return row;
}

}  // namespace

RunOutcome run_represent(const ExperimentConfig& c, const RunContext& ctx) {
  const fs::path dir = checked_directory(c);
  RunOutcome out;
  out.result = run_ensemble(c, ctx.workers);
  out.files = write_results(out.result, c, dir, true);
  out.manifest = write_manifest(c, ctx, out.result, dir, out.files);
  return out;
}

RunOutcome run_diagnose(const ExperimentConfig& c, const RunContext& ctx) {
  if (c.sweep) return run_sweep(c, ctx);
  const fs::path dir = checked_directory(c);
  ExperimentConfig d = c;
  d.output.rate_paths = 0;
  RunOutcome out;
  out.result = run_ensemble(d, ctx.workers);
  out.files = write_results(out.result, d, dir, false);
  out.manifest = write_manifest(d, ctx, out.result, dir, out.files);
  return out;
}

RunOutcome run_sweep(const ExperimentConfig& c, const RunContext& ctx) {
  if (!c.sweep) throw std::invalid_argument("sweep: configuration has no sweep block");
  const fs::path dir = checked_directory(c);
  const std::string& param = c.sweep->parameter;
  // Validates the parameter name even when the value list is empty.
  const double probe = param == "gamma" ? 0.5 : (param == "alpha" ? 0.25 : (param == "p" ? 1.5 : 64.0));
  const ExperimentConfig shape = apply_sweep_value(c, param, probe);

  ExperimentConfig base = c;
  base.output.rate_paths = 0;
  std::vector<std::string> header{"parameter", "value"};
  for (auto& h : summary_header(shape)) header.push_back(h);
  CsvTable table(header);
  json rows = json::array();

  RunOutcome out;
  for (double v : c.sweep->values) {
    ExperimentConfig vc = apply_sweep_value(base, param, v);
    vc.output.rate_paths = 0;
    EnsembleResult r = run_ensemble(vc, ctx.workers);
    std::vector<std::string> row{param, csv_number(v)};
    for (auto& cell : summary_row(vc, r)) row.push_back(cell);
    table.add_row(row);
    json entry = {{"parameter", param}, {"value", v}};
    for (std::size_t k = 2; k < header.size(); ++k) entry[header[k]] = row[k];
    if (r.singular) entry["singular_functional"] = to_json(*r.singular);
    if (r.l21) entry["l21_norm"] = to_json(*r.l21);
    if (!r.lp1.empty()) entry["lp1_norm"] = to_json(r.lp1.front());
    rows.push_back(entry);
    out.result = std::move(r);
  }

  Writer w(dir, c.output);
  w.csv("sweep.csv", table);
  w.json_doc("sweep.json", {{"parameter", param}, {"rows", rows}});
  out.files = w.files();
  out.manifest = write_manifest(base, ctx, out.result, dir, out.files);
  return out;
}

ReplayOutcome run_replay(const fs::path& manifest, const fs::path& out_dir, unsigned workers) {
  const json m = json::parse(read_text(manifest));
  if (m.value("tool", "") != "lebrep") throw std::invalid_argument("replay: not a manifest of this tool");
  ExperimentConfig c = parse_config(m.at("config"));
  c.output.directory = out_dir.string();
  RunContext ctx;
  ctx.command = m.at("command").get<std::string>();
  if (!m.at("preset").is_null()) ctx.preset = m.at("preset").get<std::string>();
  ctx.workers = workers;

  ReplayOutcome out;
  if (ctx.command == "represent") {
    out.run = run_represent(c, ctx);
  } else if (ctx.command == "diagnose") {
    out.run = run_diagnose(c, ctx);
  } else if (ctx.command == "sweep") {
    out.run = run_sweep(c, ctx);
  } else {
    throw std::invalid_argument("replay: unknown command '" + ctx.command + "'");
  }
  for (const auto& entry : m.at("outputs")) {
    const std::string name = entry.at("file");
    const fs::path f = out_dir / name;
    if (!fs::exists(f) || hex64(fnv1a(read_text(f))) != entry.at("fnv1a").get<std::string>()) {
      out.mismatched.push_back(name);
    }
  }
  return out;
}

}  // namespace lebrep
