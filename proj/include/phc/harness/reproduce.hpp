#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "phc/harness/scenario.hpp"
#include "phc/harness/table.hpp"
#include "phc/model/outcome.hpp"

namespace phc::harness {

/// Replication budget and how far simulated values may stray from published
/// ones. Analytic targets never widen.
struct Profile {
  std::size_t replications = default_replications;
  double horizon_days = default_horizon_days;
  double warmup_days = default_warmup_days;
  double tolerance_scale = 1.0;
  std::uint64_t seed = default_seed;
  unsigned threads = 0;
};

[[nodiscard]] Profile full_profile();
/// 20 x (185, 60) days with tolerances doubled.
[[nodiscard]] Profile fast_profile();

/// table5, table6, tableC1, fig2, fig3, fig4, interventions.
[[nodiscard]] const std::vector<std::string>& exhibit_ids();
[[nodiscard]] bool is_exhibit(std::string_view id);

/// Runs the scenarios behind an exhibit and joins the published values.
/// Throws std::invalid_argument for an unknown id.
[[nodiscard]] ResultTable reproduce(std::string_view id, const Profile& profile);

/// Row keys of the per-configuration exhibits.
[[nodiscard]] const std::array<std::string, 4>& configuration_rows();

/// The doctor's utilization without revisits or administration, one report
/// per configuration; shared by table5 and tableC1.
struct ValidationRuns {
  std::array<model::OutcomeReport, 4> reports;
};
[[nodiscard]] ValidationRuns validation_runs(const Profile& profile);
[[nodiscard]] ResultTable table5(const ValidationRuns& runs, const Profile& profile);
[[nodiscard]] ResultTable table_c1(const ValidationRuns& runs);
/// Analytic columns only; no simulation.
[[nodiscard]] ResultTable table5_analytic();
[[nodiscard]] ResultTable table_c1_analytic();

}  // namespace phc::harness
