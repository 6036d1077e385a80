#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "phc/harness/analytics_file.hpp"
#include "phc/harness/reproduce.hpp"
#include "phc/harness/scenario.hpp"

namespace h = phc::harness;

namespace {

struct Options {
  std::string input;
  std::string format = "csv";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<unsigned> threads;
  std::string trace;
  bool fast = false;
  bool check = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "Output file (default: standard output)");
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--reps", o.reps, "Replications")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_flag("--fast", o.fast, "20 replications of 185 days (60 warm-up), tolerances doubled");
  cmd->add_flag("--check", o.check, "Exit nonzero if any comparison with a published value fails");
}

void emit(const h::ResultTable& t, const Options& o) {
  const auto text = h::render(t, h::format_from_name(o.format));
  if (o.out.empty()) std::cout << text;
  else h::write_file(o.out, text);

  for (const auto& e : t.errors) fmt::print(stderr, "error: {}\n", e);
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
      const auto& cell = r.cells[c];
      if (cell.pass() != std::optional<bool>(false)) continue;
      fmt::print(stderr, "FAIL {}: {} {} vs target {} ({} {})\n", cell.target->exhibit, t.value_columns[c],
                 h::format_number(cell.mean), h::format_number(cell.target->value),
                 h::check_kind_name(cell.target->kind), h::format_number(cell.target->tolerance));
    }
  }
  for (const auto& c : t.checks) {
    if (!c.pass) fmt::print(stderr, "FAIL {}: {} ({})\n", c.exhibit, c.name, c.detail);
  }
  if (t.comparisons() > 0) {
    fmt::print(stderr, "{}: {} of {} comparisons passed{}\n", t.id, t.comparisons() - t.failures(), t.comparisons(),
               t.partial ? " (partial table)" : "");
  }
}

int status(const h::ResultTable& t, const Options& o) {
  if (t.partial) return 1;
  return o.check && t.failures() > 0 ? 1 : 0;
}

h::ScenarioSpec load_spec(const Options& o) {
  auto spec = h::parse_scenario_file(o.input);
  if (o.fast) {
    const auto fast = h::fast_profile();
    spec.replications = fast.replications;
    spec.horizon_days = fast.horizon_days;
    spec.warmup_days = fast.warmup_days;
  }
  if (o.reps) spec.replications = *o.reps;
  if (o.seed) spec.seed = *o.seed;
  return spec;
}

void write_spec_outputs(const h::ScenarioSpec& spec, const h::ResultTable& t) {
  if (spec.csv_out) h::write_file(*spec.csv_out, h::render(t, h::Format::csv));
  if (spec.json_out) h::write_file(*spec.json_out, h::render(t, h::Format::json));
}

int run_scenario(const Options& o, bool sweep) {
  const auto spec = load_spec(o);
  if (!sweep && !spec.axes.empty()) {
    throw h::ScenarioError("sweep: simulate runs a single scenario; use the sweep command");
  }
  const auto t = h::run_sweep(spec, o.threads.value_or(0));
  write_spec_outputs(spec, t);
  const std::string trace = !o.trace.empty() ? o.trace : spec.trace_out ? spec.trace_out->string() : "";
  if (!trace.empty()) {
    h::write_file(trace, h::trace_csv(h::configure(spec.config_id, spec.overrides, spec.interventions), spec));
  }
  emit(t, o);
  return status(t, o);
}

int run_reproduce(const Options& o) {
  auto profile = o.fast ? h::fast_profile() : h::full_profile();
  if (o.reps) profile.replications = *o.reps;
  if (o.seed) profile.seed = *o.seed;
  if (o.threads) profile.threads = *o.threads;
  const auto t = h::reproduce(o.input, profile);
  emit(t, o);
  return status(t, o);
}

int run_analytics(const Options& o) {
  std::ifstream in(o.input);
  if (!in) throw h::ScenarioError(o.input + ": cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw h::ScenarioError(o.input + ": " + e.what());
  }
  const auto t = h::run_analytics(j);
  emit(t, o);
  return status(t, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primary health centre simulation and queueing analytics"};
  app.require_subcommand(1);

  Options sim, sweep, repro, analytic;
  auto* sim_cmd = app.add_subcommand("simulate", "Run one scenario file");
  sim_cmd->add_option("scenario", sim.input, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  add_common(sim_cmd, sim);
  sim_cmd->add_option("--trace", sim.trace, "Write the event log of replication 0 to this file");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run every scenario of a scenario file's sweep axes");
  sweep_cmd->add_option("scenario", sweep.input, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  add_common(sweep_cmd, sweep);
  sweep_cmd->add_option("--trace", sweep.trace, "Write the base scenario's event log to this file");

  auto* repro_cmd = app.add_subcommand("reproduce", "Rebuild a published exhibit and compare");
  repro_cmd->add_option("exhibit", repro.input, "Exhibit id")->required()->check(CLI::IsMember(h::exhibit_ids()));
  add_common(repro_cmd, repro);

  auto* an_cmd = app.add_subcommand("analytics", "Closed-form utilization and setup analysis");
  an_cmd->add_option("classes", analytic.input, "Classes JSON file")->required()->check(CLI::ExistingFile);
  add_common(an_cmd, analytic);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim_cmd) return run_scenario(sim, false);
    if (*sweep_cmd) return run_scenario(sweep, true);
    if (*repro_cmd) return run_reproduce(repro);
    return run_analytics(analytic);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
