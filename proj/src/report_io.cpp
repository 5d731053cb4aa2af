#include "lebrep/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lebrep {

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) {
  if (header.empty()) throw std::invalid_argument("CsvTable: empty header");
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += '\n';
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::invalid_argument("CsvTable: row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
  text_ += '\n';
  ++rows_;
}

std::string CsvTable::str() const { return text_; }

// Non-finite doubles become strings; JSON has no literal for them.
static nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return csv_number(v);
}

nlohmann::json to_json(const Estimate& e) { return {{"value", number(e.mean)}, {"se", number(e.se)}}; }

nlohmann::json to_json(const RegularityReport& r) {
  nlohmann::json j;
  j["functional"] = r.functional;
  j["ladder"] = nlohmann::json::array();
  for (const auto& rung : r.ladder) {
    j["ladder"].push_back({{"epsilon", rung.epsilon}, {"value", number(rung.value)}, {"se", number(rung.se)}});
  }
  j["slope"] = number(r.slope);
  j["tail_slope"] = number(r.tail_slope);
  j["relative_increment"] = number(r.relative_increment);
  j["verdict"] = verdict_name(r.verdict);
  j["limit"] = {{"value", number(r.limit.mean)},
                {"se", number(r.limit.se)},
                {"mc_se", number(r.mc_se)},
                {"discretization", number(r.discretization)}};
  nlohmann::json norms = nlohmann::json::object();
  if (r.l21) {
    norms["l21"] = {{"value", number(r.l21->estimate.mean)},
                    {"se", number(r.l21->estimate.se)},
                    {"verdict", verdict_name(r.l21->verdict)}};
  }
  if (!r.lp1.empty()) {
    norms["lp1"] = nlohmann::json::array();
    for (const auto& n : r.lp1) {
      norms["lp1"].push_back({{"p", n.p},
                              {"value", number(n.estimate.mean)},
                              {"se", number(n.estimate.se)},
                              {"verdict", verdict_name(n.verdict)}});
    }
  }
  j["norms"] = norms;
  if (!r.extras.empty()) {
    nlohmann::json extras = nlohmann::json::object();
    for (const auto& [k, v] : r.extras) extras[k] = number(v);
    j["extras"] = extras;
  }
  return j;
}

static nlohmann::json spec_json(const PerturbationSpec& s) {
  const char* chi = s.chi == Multiplier::TanhW ? "tanh_w" : (s.chi == Multiplier::One ? "one" : "zero");
  return {{"t", s.t}, {"s", s.s}, {"chi", chi}};
}

nlohmann::json to_json(const OrthogonalityResult& r) {
  return {{"perturbation", spec_json(r.spec)}, {"inner", to_json(r.inner)}, {"statistic", number(r.statistic)}};
}

nlohmann::json to_json(const MinimalityResult& r) {
  nlohmann::json gaps = nlohmann::json::array();
  for (const auto& g : r.gaps) gaps.push_back({{"step", g.step}, {"gap", number(g.gap.mean)}, {"se", number(g.gap.se)}});
  nlohmann::json ratios = nlohmann::json::array();
  for (double x : r.doubling_ratios) ratios.push_back(number(x));
  return {{"perturbation", spec_json(r.spec)}, {"gaps", gaps}, {"doubling_ratios", ratios}};
}

nlohmann::json to_json(const GirsanovResult& r) {
  return {{"plain", to_json(r.plain)},
          {"weighted", to_json(r.weighted)},
          {"weights", to_json(r.weights)},
          {"difference_z", number(r.difference_z)}};
}

CsvTable ladder_csv(const RegularityReport& r) {
  CsvTable t({"epsilon", "value", "se"});
  for (const auto& rung : r.ladder) {
    t.add_row({csv_number(rung.epsilon), csv_number(rung.value), csv_number(rung.se)});
  }
  return t;
}

CsvTable resolvent_csv(const ResolventTable& table) {
  CsvTable t({"t", "s", "i_or_sum", "value"});
  const auto& nodes = table.nodes();
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const std::string ts = csv_number(nodes[a]), ss = csv_number(nodes[b]);
      for (int i = 0; i <= table.order(); ++i) {
        t.add_row({ts, ss, "K" + std::to_string(i), csv_number(table.closed_form(i, a, b))});
        t.add_row({ts, ss, "K" + std::to_string(i) + "_numerical", csv_number(table.numerical(i, a, b))});
      }
      for (int m = 0; m <= table.order(); ++m) {
        t.add_row({ts, ss, "S" + std::to_string(m), csv_number(table.partial_sum(m, a, b))});
      }
    }
  }
  return t;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lebrep
