#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>

#include "lebrep/experiment.hpp"
#include "lebrep/rates.hpp"

namespace lebrep {

// Defined in the generated presets.cpp.
const std::map<std::string, std::string>& bundled_presets();

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("config: " + what); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      fail("unknown key '" + k + "' in " + where);
    }
  }
}

double number_at(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(std::string(key) + " must be a number");
  return j[key].get<double>();
}

std::size_t count_at(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j[key];
  // signed when built in code, unsigned when parsed from text
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    fail(std::string(key) + " must be a non-negative integer");
  }
  return j[key].get<std::size_t>();
}

std::vector<double> numbers_at(const json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_array()) fail(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) fail(std::string(key) + " entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

PayoffSpec parse_payoff(const json& j) {
  if (!j.is_object() || !j.contains("variant") || !j["variant"].is_string()) {
    fail("payoff needs a string 'variant'");
  }
  const std::string v = j["variant"];
  if (v == "sigma_integral") {
    allow_keys(j, "payoff", {"variant", "sigma", "value", "cutoff"});
    SigmaIntegral s;
    const std::string kind = j.value("sigma", std::string("constant"));
    if (kind == "constant") {
      s.kind = SigmaKind::Constant;
    } else if (kind == "step") {
      s.kind = SigmaKind::Step;
    } else if (kind == "cos_w") {
      s.kind = SigmaKind::CosW;
    } else {
      fail("unknown sigma '" + kind + "'");
    }
    s.value = number_at(j, "value", 1.0);
    s.cutoff = number_at(j, "cutoff", 0.0);
    return s;
  }
  if (v == "power_sigma") {
    allow_keys(j, "payoff", {"variant", "gamma"});
    return PowerSigma{number_at(j, "gamma", 0.5)};
  }
  if (v == "time_average") {
    allow_keys(j, "payoff", {"variant"});
    return TimeAverage{};
  }
  if (v == "terminal_function") {
    allow_keys(j, "payoff", {"variant", "g", "value"});
    TerminalFunction f;
    const std::string g = j.value("g", std::string("identity"));
    if (g == "identity") {
      f.g = TerminalG::Identity;
    } else if (g == "square_minus_t") {
      f.g = TerminalG::SquareMinusT;
    } else if (g == "constant") {
      f.g = TerminalG::Constant;
    } else {
      fail("unknown terminal function '" + g + "'");
    }
    f.value = number_at(j, "value", 0.0);
    return f;
  }
  fail("unknown payoff variant '" + v + "'");
}

json payoff_json(const PayoffSpec& spec) {
  if (const auto* s = std::get_if<SigmaIntegral>(&spec)) {
    const char* kind = s->kind == SigmaKind::Constant ? "constant" : (s->kind == SigmaKind::Step ? "step" : "cos_w");
    return {{"variant", "sigma_integral"}, {"sigma", kind}, {"value", s->value}, {"cutoff", s->cutoff}};
  }
  if (const auto* p = std::get_if<PowerSigma>(&spec)) return {{"variant", "power_sigma"}, {"gamma", p->gamma}};
  if (std::holds_alternative<TimeAverage>(spec)) return {{"variant", "time_average"}};
  const auto& f = std::get<TerminalFunction>(spec);
  const char* g = f.g == TerminalG::Identity ? "identity" : (f.g == TerminalG::SquareMinusT ? "square_minus_t" : "constant");
  return {{"variant", "terminal_function"}, {"g", g}, {"value", f.value}};
}

GridConfig parse_grid(const json& j) {
  allow_keys(j, "grid", {"T", "N", "q"});
  GridConfig g;
  g.horizon = number_at(j, "T", g.horizon);
  g.intervals = count_at(j, "N", g.intervals);
  g.grading = number_at(j, "q", g.grading);
  if (!(g.horizon > 0.0)) fail("grid.T must be positive");
  if (g.intervals < 2) fail("grid.N must be >= 2");
  if (!(g.grading >= 1.0)) fail("grid.q must be >= 1");
  return g;
}

json grid_json(const GridConfig& g) { return {{"T", g.horizon}, {"N", g.intervals}, {"q", g.grading}}; }

Multiplier parse_multiplier(const std::string& s) {
  if (s == "tanh_w") return Multiplier::TanhW;
  if (s == "one") return Multiplier::One;
  if (s == "zero") return Multiplier::Zero;
  fail("unknown multiplier '" + s + "'");
}

const char* multiplier_name(Multiplier m) {
  switch (m) {
    case Multiplier::TanhW: return "tanh_w";
    case Multiplier::One: return "one";
    case Multiplier::Zero: return "zero";
  }
  return "tanh_w";
}

}  // namespace

double RepresentationConfig::resolved_alpha() const {
  if (kind != RepresentationKind::Fractional) return std::nan("");
  if (alpha) return *alpha;
  if (p) return alpha_for_p(*p);
  fail("fractional representation needs 'alpha' or 'auto_from_p'");
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "reproduction", "refinement",  "rate_agreement", "singular_functional", "l21_norm",
      "lp1_norm",     "orthogonality", "minimality",   "veraar",              "gprime",
      "girsanov",     "resolvent",   "rl_variance"};
  return names;
}

ExperimentConfig parse_config(const json& j) {
  allow_keys(j, "config",
             {"name", "payoff", "grid", "mc", "representation", "diagnostics", "options", "sweep", "output"});
  ExperimentConfig c;
  if (j.contains("name")) c.name = j["name"].get<std::string>();
  if (j.contains("payoff")) c.payoff = parse_payoff(j["payoff"]);
  validate_payoff(c.payoff);
  if (j.contains("grid")) c.grid = parse_grid(j["grid"]);

  if (j.contains("mc")) {
    const json& m = j["mc"];
    allow_keys(m, "mc", {"n_paths", "seed", "batch_size"});
    c.mc.n_paths = count_at(m, "n_paths", c.mc.n_paths);
    c.mc.seed = count_at(m, "seed", c.mc.seed);
    c.mc.batch_size = count_at(m, "batch_size", c.mc.batch_size);
    if (c.mc.n_paths < 1) fail("mc.n_paths must be >= 1");
    if (c.mc.batch_size < 1) fail("mc.batch_size must be >= 1");
  }

  if (j.contains("representation")) {
    const json& r = j["representation"];
    allow_keys(r, "representation", {"kind", "alpha", "auto_from_p"});
    const std::string kind = r.value("kind", std::string("canonical"));
    if (kind == "canonical") {
      c.representation.kind = RepresentationKind::Canonical;
    } else if (kind == "lebesgue") {
      c.representation.kind = RepresentationKind::Lebesgue;
    } else if (kind == "volterra") {
      c.representation.kind = RepresentationKind::Volterra;
    } else if (kind == "fractional") {
      c.representation.kind = RepresentationKind::Fractional;
      if (r.contains("alpha") == r.contains("auto_from_p")) {
        fail("fractional representation needs exactly one of 'alpha' and 'auto_from_p'");
      }
      if (r.contains("alpha")) c.representation.alpha = number_at(r, "alpha", 0.0);
      if (r.contains("auto_from_p")) c.representation.p = number_at(r, "auto_from_p", 0.0);
      c.representation.resolved_alpha();
    } else {
      fail("unknown representation '" + kind + "'");
    }
    if (kind != "fractional" && (r.contains("alpha") || r.contains("auto_from_p"))) {
      fail("alpha/auto_from_p only apply to the fractional representation");
    }
  }

  if (j.contains("diagnostics")) {
    if (!j["diagnostics"].is_array()) fail("diagnostics must be an array of names");
    const auto& known = check_names();
    std::set<std::string> seen;
    for (const auto& d : j["diagnostics"]) {
      const std::string name = d.get<std::string>();
      if (std::find(known.begin(), known.end(), name) == known.end()) fail("unknown check '" + name + "'");
      if (!seen.insert(name).second) fail("check '" + name + "' listed twice");
      c.diagnostics.push_back(name);
    }
  }

  if (j.contains("options")) {
    const json& o = j["options"];
    allow_keys(o, "options",
               {"lp", "theta", "perturbations", "steps", "resolvent", "refinement", "rl_times", "agreement_depth"});
    auto& d = c.options;
    d.lp = numbers_at(o, "lp", d.lp);
    for (double p : d.lp) check_lp_exponent(p);
    if (o.contains("theta")) {
      const json& t = o["theta"];
      allow_keys(t, "options.theta", {"kind", "value"});
      if (t.value("kind", std::string("constant")) != "constant") {
        fail("theta must be a deterministic constant drift");
      }
      d.theta = number_at(t, "value", d.theta);
    }
    if (o.contains("perturbations")) {
      d.perturbations.clear();
      for (const auto& p : o["perturbations"]) {
        allow_keys(p, "perturbation", {"t", "s", "chi"});
        PerturbationSpec s;
        s.t = number_at(p, "t", s.t);
        s.s = number_at(p, "s", s.s);
        s.chi = parse_multiplier(p.value("chi", std::string("tanh_w")));
        d.perturbations.push_back(s);
      }
    }
    d.steps = numbers_at(o, "steps", d.steps);
    if (o.contains("resolvent")) {
      const json& r = o["resolvent"];
      allow_keys(r, "options.resolvent", {"order", "nodes", "grid"});
      d.resolvent_order = static_cast<int>(count_at(r, "order", static_cast<std::size_t>(d.resolvent_order)));
      d.resolvent_nodes = count_at(r, "nodes", d.resolvent_nodes);
      if (r.contains("grid")) d.resolvent_grid = parse_grid(r["grid"]);
    }
    if (o.contains("refinement")) {
      d.refinement.clear();
      for (double v : numbers_at(o, "refinement", {})) {
        if (!(v >= 2.0) || v != std::floor(v)) fail("refinement entries must be integers >= 2");
        d.refinement.push_back(static_cast<std::size_t>(v));
      }
    }
    d.rl_times = numbers_at(o, "rl_times", d.rl_times);
    d.agreement_depth = static_cast<int>(count_at(o, "agreement_depth", static_cast<std::size_t>(d.agreement_depth)));
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    allow_keys(s, "sweep", {"parameter", "values"});
    SweepConfig sw;
    sw.parameter = s.value("parameter", std::string());
    sw.values = numbers_at(s, "values", {});
    c.sweep = sw;
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    allow_keys(o, "output", {"directory", "formats", "rate_paths"});
    c.output.directory = o.value("directory", c.output.directory);
    if (o.contains("formats")) {
      c.output.csv = c.output.json = false;
      for (const auto& f : o["formats"]) {
        const std::string name = f.get<std::string>();
        if (name == "csv") {
          c.output.csv = true;
        } else if (name == "json") {
          c.output.json = true;
        } else {
          fail("unknown output format '" + name + "'");
        }
      }
    }
    c.output.rate_paths = count_at(o, "rate_paths", c.output.rate_paths);
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["payoff"] = payoff_json(c.payoff);
  j["grid"] = grid_json(c.grid);
  j["mc"] = {{"n_paths", c.mc.n_paths}, {"seed", c.mc.seed}, {"batch_size", c.mc.batch_size}};
  json r;
  switch (c.representation.kind) {
    case RepresentationKind::Canonical: r["kind"] = "canonical"; break;
    case RepresentationKind::Lebesgue: r["kind"] = "lebesgue"; break;
    case RepresentationKind::Volterra: r["kind"] = "volterra"; break;
    case RepresentationKind::Fractional:
      r["kind"] = "fractional";
      if (c.representation.alpha) r["alpha"] = *c.representation.alpha;
      if (c.representation.p) r["auto_from_p"] = *c.representation.p;
      break;
  }
  j["representation"] = r;
  j["diagnostics"] = c.diagnostics;

  const auto& d = c.options;
  json o;
  o["lp"] = d.lp;
  o["theta"] = {{"kind", "constant"}, {"value", d.theta}};
  json perts = json::array();
  for (const auto& p : d.perturbations) perts.push_back({{"t", p.t}, {"s", p.s}, {"chi", multiplier_name(p.chi)}});
  o["perturbations"] = perts;
  o["steps"] = d.steps;
  json res = {{"order", d.resolvent_order}, {"nodes", d.resolvent_nodes}};
  if (d.resolvent_grid) res["grid"] = grid_json(*d.resolvent_grid);
  o["resolvent"] = res;
  o["refinement"] = d.refinement;
  o["rl_times"] = d.rl_times;
  o["agreement_depth"] = d.agreement_depth;
  j["options"] = o;

  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  json formats = json::array();
  if (c.output.csv) formats.push_back("csv");
  if (c.output.json) formats.push_back("json");
  j["output"] = {{"directory", c.output.directory}, {"formats", formats}, {"rate_paths", c.output.rate_paths}};
  return j;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : bundled_presets()) names.push_back(k);
  return names;
}

std::string preset_text(const std::string& name) {
  const auto& all = bundled_presets();
  const auto it = all.find(name);
  if (it == all.end()) throw std::invalid_argument("unknown preset '" + name + "'");
  return it->second;
}

ExperimentConfig load_preset(const std::string& name) {
  return parse_config(json::parse(preset_text(name)));
}

}  // namespace lebrep
