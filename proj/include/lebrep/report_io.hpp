#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lebrep/diagnostics.hpp"
#include "lebrep/resolvent.hpp"

namespace lebrep {

/// Round-trip decimal form used in every CSV cell (17 significant digits).
std::string csv_number(double v);

/// Accumulates a CSV document; the header is fixed at construction.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  std::size_t rows() const { return rows_; }

 private:
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const RegularityReport& r);
nlohmann::json to_json(const OrthogonalityResult& r);
nlohmann::json to_json(const MinimalityResult& r);
nlohmann::json to_json(const GirsanovResult& r);

CsvTable ladder_csv(const RegularityReport& r);
/// Rows (t, s, i_or_sum, value): closed-form K^i, numerical K^i and S_m.
CsvTable resolvent_csv(const ResolventTable& table);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace lebrep
