#include "phc/harness/table.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include <fmt/format.h>

namespace phc::harness {

using nlohmann::json;

namespace {

constexpr std::string_view na = "NA";

const std::vector<std::string_view>& target_suffixes() {
  static const std::vector<std::string_view> s{"target",  "check",     "tolerance", "exhibit",
                                               "abs_delta", "rel_delta", "pass"};
  return s;
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw std::runtime_error("csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_number(const std::string& s, std::string_view what) {
  if (s == "nan") return not_a_number;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw std::runtime_error(fmt::format("csv: {} is not a number: \"{}\"", what, s));
  }
  return v;
}

json number_json(double x) {
  if (std::isnan(x)) return nullptr;
  return round_sig6(x);
}

double json_number(const json& j) { return j.is_null() ? not_a_number : j.get<double>(); }

}  // namespace

std::string_view check_kind_name(CheckKind k) {
  switch (k) {
    case CheckKind::band: return "band";
    case CheckKind::at_most: return "at_most";
    case CheckKind::at_least: return "at_least";
    case CheckKind::rounds_to: return "rounds_to";
    case CheckKind::reference: return "reference";
  }
  return "reference";
}

CheckKind check_kind_from_name(std::string_view name) {
  for (auto k : {CheckKind::band, CheckKind::at_most, CheckKind::at_least, CheckKind::rounds_to,
                 CheckKind::reference}) {
    if (check_kind_name(k) == name) return k;
  }
  throw std::runtime_error(fmt::format("unknown check kind \"{}\"", name));
}

std::optional<bool> Cell::pass() const {
  if (!target || !applicable || target->kind == CheckKind::reference) return std::nullopt;
  if (std::isnan(mean)) return false;
  const Target& t = *target;
  switch (t.kind) {
    case CheckKind::band: return std::abs(mean - t.value) <= t.tolerance + 1e-12;
    case CheckKind::at_most: return mean <= t.value;
    case CheckKind::at_least: return mean >= t.value;
    case CheckKind::rounds_to: {
      const double scale = std::pow(10.0, t.tolerance);
      return std::round(mean * scale) == std::round(t.value * scale);
    }
    case CheckKind::reference: break;
  }
  return std::nullopt;
}

double Cell::abs_delta() const { return target && applicable ? mean - target->value : not_a_number; }

double Cell::rel_delta() const {
  return target && applicable && target->value != 0.0 ? (mean - target->value) / target->value : not_a_number;
}

ResultTable::Row& ResultTable::add_row(std::vector<std::string> key) {
  if (key.size() != key_columns.size()) throw std::logic_error("row key does not match key columns");
  rows.push_back({std::move(key), std::vector<Cell>(value_columns.size())});
  return rows.back();
}

std::size_t ResultTable::column(std::string_view name) const {
  const auto it = std::find(value_columns.begin(), value_columns.end(), name);
  if (it == value_columns.end()) throw std::out_of_range(fmt::format("table {} has no column {}", id, name));
  return static_cast<std::size_t>(it - value_columns.begin());
}

const ResultTable::Row* ResultTable::find_row(const std::vector<std::string>& key) const {
  for (const auto& r : rows) {
    if (r.key == key) return &r;
  }
  return nullptr;
}

const Cell& ResultTable::at(const std::vector<std::string>& key, std::string_view col) const {
  const Row* r = find_row(key);
  if (!r) throw std::out_of_range(fmt::format("table {} has no row {}", id, fmt::join(key, "/")));
  return r->cells[column(col)];
}

Cell& ResultTable::at(const std::vector<std::string>& key, std::string_view col) {
  return const_cast<Cell&>(std::as_const(*this).at(key, col));
}

std::size_t ResultTable::comparisons() const {
  std::size_t n = checks.size();
  for (const auto& r : rows) {
    for (const auto& c : r.cells) n += c.pass().has_value();
  }
  return n;
}

std::size_t ResultTable::failures() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += !c.pass;
  for (const auto& r : rows) {
    for (const auto& c : r.cells) n += c.pass() == std::optional<bool>(false);
  }
  return n;
}

double round_sig6(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(fmt::format("{:.6g}", x));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0";  // no negative zero
  return fmt::format("{:.6g}", x);
}

std::string to_csv(const ResultTable& table) {
  const ResultTable t = rounded(table);
  std::vector<bool> has_target(t.value_columns.size(), false);
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.cells.size(); ++c) has_target[c] = has_target[c] || r.cells[c].target;
  }
  std::vector<std::string> header;
  for (const auto& k : t.key_columns) header.push_back(quote(k));
  for (std::size_t c = 0; c < t.value_columns.size(); ++c) {
    const auto& name = t.value_columns[c];
    header.push_back(quote(name));
    header.push_back(quote(name + ":sd"));
    if (has_target[c]) {
      for (auto s : target_suffixes()) header.push_back(quote(fmt::format("{}:{}", name, s)));
    }
  }
  std::string out = fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& r : t.rows) {
    std::vector<std::string> f;
    for (const auto& k : r.key) f.push_back(quote(k));
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
      const Cell& cell = r.cells[c];
      f.push_back(cell.applicable ? format_number(cell.mean) : std::string(na));
      f.push_back(cell.applicable ? format_number(cell.sd) : std::string(na));
      if (!has_target[c]) continue;
      if (!cell.target) {
        f.insert(f.end(), target_suffixes().size(), "");
        continue;
      }
      const Target& tg = *cell.target;
      const auto pass = cell.pass();
      f.push_back(format_number(tg.value));
      f.push_back(std::string(check_kind_name(tg.kind)));
      f.push_back(format_number(tg.tolerance));
      f.push_back(quote(tg.exhibit));
      f.push_back(cell.applicable ? format_number(cell.abs_delta()) : std::string(na));
      f.push_back(cell.applicable ? format_number(cell.rel_delta()) : std::string(na));
      f.push_back(pass ? (*pass ? "pass" : "fail") : "");
    }
    out += fmt::format("{}\n", fmt::join(f, ","));
  }
  return out;
}

ResultTable table_from_csv(std::string_view csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw std::runtime_error("csv: missing header row");
  const auto& header = rows.front();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;

  ResultTable t;
  std::size_t i = 0;
  for (; i < header.size() && !index.contains(header[i] + ":sd"); ++i) t.key_columns.push_back(header[i]);
  for (; i < header.size(); ++i) {
    if (header[i].find(':') == std::string::npos) t.value_columns.push_back(header[i]);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != header.size()) {
      throw std::runtime_error(fmt::format("csv: row {} has {} fields, header has {}", r, f.size(), header.size()));
    }
    auto& row = t.add_row({f.begin(), f.begin() + static_cast<std::ptrdiff_t>(t.key_columns.size())});
    for (std::size_t c = 0; c < t.value_columns.size(); ++c) {
      const auto& name = t.value_columns[c];
      Cell& cell = row.cells[c];
      const auto& mean = f[index.at(name)];
      cell.applicable = mean != na;
      if (cell.applicable) {
        cell.mean = parse_number(mean, name);
        cell.sd = parse_number(f[index.at(name + ":sd")], name + ":sd");
      }
      const auto target = index.find(name + ":target");
      if (target == index.end() || f[target->second].empty()) continue;
      Target tg;
      tg.value = parse_number(f[target->second], name + ":target");
      tg.kind = check_kind_from_name(f[index.at(name + ":check")]);
      tg.tolerance = parse_number(f[index.at(name + ":tolerance")], name + ":tolerance");
      tg.exhibit = f[index.at(name + ":exhibit")];
      cell.target = tg;
    }
  }
  return t;
}

json to_json(const ResultTable& table) {
  const ResultTable t = rounded(table);
  json rows = json::array();
  for (const auto& r : t.rows) {
    json cells = json::object();
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
      const Cell& cell = r.cells[c];
      json jc{{"applicable", cell.applicable}, {"mean", number_json(cell.mean)}, {"sd", number_json(cell.sd)}};
      if (cell.target) {
        const auto pass = cell.pass();
        jc["target"] = {{"value", number_json(cell.target->value)},
                        {"check", check_kind_name(cell.target->kind)},
                        {"tolerance", number_json(cell.target->tolerance)},
                        {"exhibit", cell.target->exhibit}};
        jc["abs_delta"] = number_json(cell.abs_delta());
        jc["rel_delta"] = number_json(cell.rel_delta());
        jc["pass"] = pass ? json(*pass) : json(nullptr);
      }
      cells[t.value_columns[c]] = std::move(jc);
    }
    rows.push_back({{"key", r.key}, {"cells", std::move(cells)}});
  }
  json checks = json::array();
  for (const auto& c : t.checks) {
    checks.push_back({{"name", c.name}, {"exhibit", c.exhibit}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return {{"id", t.id},
          {"key_columns", t.key_columns},
          {"value_columns", t.value_columns},
          {"rows", std::move(rows)},
          {"checks", std::move(checks)},
          {"partial", t.partial},
          {"errors", t.errors},
          {"comparisons", t.comparisons()},
          {"failures", t.failures()}};
}

ResultTable table_from_json(const json& j) {
  ResultTable t;
  t.id = j.at("id").get<std::string>();
  t.key_columns = j.at("key_columns").get<std::vector<std::string>>();
  t.value_columns = j.at("value_columns").get<std::vector<std::string>>();
  t.partial = j.value("partial", false);
  t.errors = j.value("errors", std::vector<std::string>{});
  for (const auto& jr : j.at("rows")) {
    auto& row = t.add_row(jr.at("key").get<std::vector<std::string>>());
    for (std::size_t c = 0; c < t.value_columns.size(); ++c) {
      const auto& jc = jr.at("cells").at(t.value_columns[c]);
      Cell& cell = row.cells[c];
      cell.applicable = jc.at("applicable").get<bool>();
      cell.mean = json_number(jc.at("mean"));
      cell.sd = json_number(jc.at("sd"));
      if (jc.contains("target")) {
        const auto& jt = jc["target"];
        cell.target = Target{json_number(jt.at("value")), check_kind_from_name(jt.at("check").get<std::string>()),
                             json_number(jt.at("tolerance")), jt.at("exhibit").get<std::string>()};
      }
    }
  }
  for (const auto& jc : j.value("checks", json::array())) {
    t.checks.push_back({jc.at("name").get<std::string>(), jc.at("exhibit").get<std::string>(),
                        jc.at("pass").get<bool>(), jc.at("detail").get<std::string>()});
  }
  return t;
}

Format format_from_name(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw std::invalid_argument(fmt::format("unknown format \"{}\" (expected csv or json)", name));
}

std::string render(const ResultTable& table, Format format) {
  return format == Format::csv ? to_csv(table) : to_json(table).dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << content;
  out.close();
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

ResultTable rounded(ResultTable t) {
  for (auto& r : t.rows) {
    for (auto& c : r.cells) {
      if (!c.applicable) {
        c.mean = c.sd = not_a_number;
        continue;
      }
      c.mean = round_sig6(c.mean);
      c.sd = round_sig6(c.sd);
      if (c.target) {
        c.target->value = round_sig6(c.target->value);
        c.target->tolerance = round_sig6(c.target->tolerance);
      }
    }
  }
  return t;
}

}  // namespace phc::harness
