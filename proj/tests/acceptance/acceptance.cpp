#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "phc/harness/reproduce.hpp"

namespace h = phc::harness;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, std::string note) {
    if (!ok) {
      pass = false;
      notes.push_back(std::move(note));
    }
  }
};

/// Every compared cell in `columns` (all when empty) and, optionally, every
/// multi-cell check.
void require_table(Verdict& v, const h::ResultTable& t, const std::vector<std::string>& columns = {},
                   bool include_checks = true, const std::vector<std::string>& rows = {}) {
  for (const auto& e : t.errors) v.require(false, e);
  for (const auto& r : t.rows) {
    if (!rows.empty() && std::find(rows.begin(), rows.end(), r.key.front()) == rows.end()) continue;
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
      const auto& name = t.value_columns[c];
      if (!columns.empty() && std::find(columns.begin(), columns.end(), name) == columns.end()) continue;
      const auto pass = r.cells[c].pass();
      if (!pass) continue;
      const auto& target = *r.cells[c].target;
      v.require(*pass, fmt::format("{} = {} (target {}, {} {})", target.exhibit, h::format_number(r.cells[c].mean),
                                   h::format_number(target.value), h::check_kind_name(target.kind),
                                   h::format_number(target.tolerance)));
    }
  }
  if (!include_checks) return;
  for (const auto& c : t.checks) v.require(c.pass, fmt::format("{}: {} ({})", c.exhibit, c.name, c.detail));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria, one line each"};
  bool fast = false;
  std::vector<std::string> suites;
  app.add_flag("--fast", fast, "Reduced replication budget with doubled tolerances");
  app.add_option("suites", suites, "Property-suite executables for criterion 7");
  CLI11_PARSE(app, argc, argv);

  const auto profile = fast ? h::fast_profile() : h::full_profile();
  int failed = 0;
  auto report = [&](int id, std::string_view title, const Verdict& v, const std::string& info = "") {
    failed += !v.pass;
    fmt::print("criterion {} {} {}{}{}\n", id, v.pass ? "PASS" : "FAIL", title, info.empty() ? "" : " | " + info,
               v.notes.empty() ? "" : fmt::format(" | {}", fmt::join(v.notes, "; ")));
    std::fflush(stdout);
  };

  {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const auto t = h::table5_analytic();
    const double elapsed = seconds_since(start);
    require_table(v, t);
    v.require(elapsed < 1.0, fmt::format("took {:.3f} s", elapsed));
    report(1, "additive utilization matches the published rho_a column", v, fmt::format("{:.4f} s", elapsed));
  }
  {
    Verdict v;
    require_table(v, h::table_c1_analytic());
    report(2, "rho_o and rho_ap within 0.002 of the published columns", v);
  }
  {
    Verdict v;
    const auto t = h::table5(h::validation_runs(profile), profile);
    require_table(v, t, {"rho_hat"}, false, {"config_1", "config_2", "config_3"});
    require_table(v, t, {"rejected", "relative_gap"});
    std::string info;
    for (const auto& r : h::configuration_rows()) {
      info += fmt::format("{}{} rho_hat {} p {}", info.empty() ? "" : ", ", r, h::format_number(t.at({r}, "rho_hat").mean),
                          h::format_number(t.at({r}, "p_value").mean));
    }
    report(3, "validation-mode doctor utilization and t-test pattern", v, info);
  }
  {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    require_table(v, h::reproduce("table6", profile));
    const double per_configuration = seconds_since(start) / 4.0;
    v.require(per_configuration <= 600.0, "replication budget exceeds 10 minutes per configuration");
    report(4, "operational outcomes within their bands", v,
           fmt::format("{:.0f} s per configuration", per_configuration));
  }
  {
    Verdict v;
    require_table(v, h::reproduce("fig2", profile), {"doctor_utilization"});
    require_table(v, h::reproduce("fig3", profile), {"referral_fraction"});
    report(5, "sensitivity shape: overtime cell, referral at 2 births/day, pharmacy wait trend", v);
  }
  {
    Verdict v;
    require_table(v, h::reproduce("interventions", profile));
    report(6, "intervention effects on doctor and NCD nurse", v);
  }
  {
    Verdict v;
    v.require(!suites.empty(), "no property suites given");
    for (const auto& s : suites) {
      const int rc = std::system(fmt::format("\"{}\" > /dev/null 2>&1", s).c_str());
      v.require(rc == 0, fmt::format("{} exited with {}", s, rc));
    }
    report(7, "property suites green", v, fmt::format("{} suites", suites.size()));
  }
  return failed == 0 ? 0 : 1;
}
