#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace phc::harness {

inline constexpr double not_a_number = std::numeric_limits<double>::quiet_NaN();

/// How a cell is compared with its published value.
///   band:      |value - target| <= tolerance
///   at_most:   value <= target
///   at_least:  value >= target
///   rounds_to: value rounded to `decimals` places equals target
///   reference: reported with deltas, no pass/fail
enum class CheckKind { band, at_most, at_least, rounds_to, reference };

[[nodiscard]] std::string_view check_kind_name(CheckKind k);
[[nodiscard]] CheckKind check_kind_from_name(std::string_view name);

struct Target {
  double value = 0.0;
  CheckKind kind = CheckKind::band;
  /// Band half-width, or decimal places for rounds_to.
  double tolerance = 0.0;
  /// Exhibit coordinate "<exhibit>:<row>:<column>".
  std::string exhibit;

  [[nodiscard]] bool operator==(const Target&) const = default;
};

struct Cell {
  double mean = not_a_number;
  double sd = not_a_number;
  bool applicable = true;
  std::optional<Target> target;

  /// Absent when there is no target, the kind is reference, or the cell does
  /// not apply.
  [[nodiscard]] std::optional<bool> pass() const;
  [[nodiscard]] double abs_delta() const;
  [[nodiscard]] double rel_delta() const;
};

/// A comparison spanning several cells (trends, differences).
struct Check {
  std::string name;
  std::string exhibit;
  bool pass = false;
  std::string detail;

  [[nodiscard]] bool operator==(const Check&) const = default;
};

struct ResultTable {
  struct Row {
    std::vector<std::string> key;
    std::vector<Cell> cells;
  };

  std::string id;
  std::vector<std::string> key_columns;
  std::vector<std::string> value_columns;
  std::vector<Row> rows;
  std::vector<Check> checks;
  /// Set when some scenario failed; `errors` says which.
  bool partial = false;
  std::vector<std::string> errors;

  Row& add_row(std::vector<std::string> key);
  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] const Row* find_row(const std::vector<std::string>& key) const;
  [[nodiscard]] const Cell& at(const std::vector<std::string>& key, std::string_view column) const;
  Cell& at(const std::vector<std::string>& key, std::string_view column);

  [[nodiscard]] std::size_t comparisons() const;
  [[nodiscard]] std::size_t failures() const;
};

/// Six significant digits, the precision of every export.
[[nodiscard]] double round_sig6(double x);
[[nodiscard]] std::string format_number(double x);

/// Wide layout: key columns, then per value column its mean under the bare
/// name plus ":sd" and, when any row has a target, ":target", ":check",
/// ":tolerance", ":exhibit", ":abs_delta", ":rel_delta", ":pass". Cells that
/// do not apply read NA. Multi-cell checks are not part of the CSV.
[[nodiscard]] std::string to_csv(const ResultTable& table);
/// Columns with a ":sd" companion are value columns; the leading rest are keys.
[[nodiscard]] ResultTable table_from_csv(std::string_view csv);

[[nodiscard]] nlohmann::json to_json(const ResultTable& table);
[[nodiscard]] ResultTable table_from_json(const nlohmann::json& j);

enum class Format { csv, json };
[[nodiscard]] Format format_from_name(std::string_view name);
[[nodiscard]] std::string render(const ResultTable& table, Format format);
/// Throws std::runtime_error naming the path when it cannot be written.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Same table after a round trip through an export. Exports render from it,
/// so deltas and pass marks agree with the printed numbers.
[[nodiscard]] ResultTable rounded(ResultTable table);

}  // namespace phc::harness
