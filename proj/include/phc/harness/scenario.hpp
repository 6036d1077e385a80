#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "phc/harness/table.hpp"
#include "phc/model/config.hpp"
#include "phc/model/facility.hpp"

namespace phc::harness {

inline constexpr int scenario_schema_version = 1;
inline constexpr std::uint64_t default_seed = 20190601;
inline constexpr std::size_t default_replications = 100;
inline constexpr double default_horizon_days = 365.0;
inline constexpr double default_warmup_days = 180.0;
inline constexpr std::size_t default_sweep_cap = 256;

/// Invalid scenario input; the message starts with the offending field path.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One sweep dimension. `field` is a configuration field name or
/// "interventions.<flag>".
struct SweepAxis {
  std::string field;
  std::vector<nlohmann::json> values;
};

struct ScenarioSpec {
  int config_id = 1;
  nlohmann::json overrides = nlohmann::json::object();
  nlohmann::json interventions = nlohmann::json::object();
  std::size_t replications = default_replications;
  double horizon_days = default_horizon_days;
  double warmup_days = default_warmup_days;
  std::uint64_t seed = default_seed;
  std::vector<SweepAxis> axes;
  std::size_t sweep_cap = default_sweep_cap;
  std::optional<std::filesystem::path> csv_out;
  std::optional<std::filesystem::path> json_out;
  std::optional<std::filesystem::path> trace_out;

  [[nodiscard]] std::size_t scenario_count() const;
};

/// One point of a sweep: its coordinates and the configuration to run.
struct Scenario {
  std::vector<std::pair<std::string, nlohmann::json>> coordinates;
  model::PhcConfiguration config;
};

/// Parses and validates; every referenced field and sweep value is checked by
/// building the configuration it implies.
///
/// {
///   "schema_version": 1,
///   "configuration": {"id": 1, "overrides": {...}},
///   "interventions": {...},
///   "replications": 100, "horizon_days": 365, "warmup_days": 180, "seed": 1,
///   "sweep": {"max_scenarios": 256, "axes": [{"field": "consult_mean", "values": [0.87, 5]}]},
///   "outputs": {"csv": "out.csv", "json": "out.json", "trace": "trace.csv"}
/// }
[[nodiscard]] ScenarioSpec parse_scenario(const nlohmann::json& j);
[[nodiscard]] ScenarioSpec parse_scenario_file(const std::filesystem::path& path);

/// Cartesian product of the axes, first axis slowest. No axes = one scenario.
[[nodiscard]] std::vector<Scenario> expand(const ScenarioSpec& spec);

/// Builds one configuration from a base, overrides, interventions and axis
/// coordinates. Throws ConfigError with the field path.
[[nodiscard]] model::PhcConfiguration configure(int config_id, const nlohmann::json& overrides,
                                                const nlohmann::json& interventions,
                                                const std::vector<std::pair<std::string, nlohmann::json>>&
                                                    coordinates = {});

/// Outcome columns of sweep and simulate tables, in metric order.
[[nodiscard]] std::vector<std::string> outcome_columns();
void fill_outcomes(ResultTable::Row& row, const model::OutcomeReport& report);

/// Every scenario with the same base seed, so all of them see the same
/// per-process random streams. A failing scenario leaves a row of NaN cells,
/// an entry in `errors`, and marks the table partial.
[[nodiscard]] ResultTable run_sweep(const ScenarioSpec& spec, unsigned threads = 0);

/// Event log of replication 0, one line per transition:
/// time,patient,class,resource,event.
[[nodiscard]] std::string trace_csv(const model::PhcConfiguration& config, const ScenarioSpec& spec);

}  // namespace phc::harness
