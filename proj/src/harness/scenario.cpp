#include "phc/harness/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace phc::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ScenarioError(path + ": " + message);
}

void allow_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, v] : j.items()) {
    if (!allowed.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}


std::uint64_t as_count(const json& v, const std::string& path, std::uint64_t min) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min)) {
    fail(path, fmt::format("expected an integer >= {}", min));
  }
  return v.get<std::uint64_t>();
}

double as_days(const json& v, const std::string& path) {
  if (!v.is_number() || !(v.get<double>() > 0.0)) fail(path, "expected a positive number of days");
  return v.get<double>();
}

std::filesystem::path as_path(const json& v, const std::string& path) {
  if (!v.is_string() || v.get<std::string>().empty()) fail(path, "expected a file path");
  return v.get<std::string>();
}

constexpr std::string_view intervention_prefix = "interventions.";

bool is_intervention_axis(const std::string& field) { return field.starts_with(intervention_prefix); }

std::string key_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

using Coordinates = std::vector<std::pair<std::string, json>>;

std::vector<Coordinates> grid(const ScenarioSpec& spec) {
  std::vector<Coordinates> points{{}};
  for (const auto& axis : spec.axes) {
    std::vector<Coordinates> next;
    for (const auto& p : points) {
      for (const auto& v : axis.values) {
        auto q = p;
        q.emplace_back(axis.field, v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

}  // namespace

std::size_t ScenarioSpec::scenario_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

model::PhcConfiguration configure(int config_id, const json& overrides, const json& interventions,
                                  const std::vector<std::pair<std::string, json>>& coordinates) {
  auto config = model::build_configuration(config_id, overrides, "configuration.overrides");
  json flags = interventions.is_null() ? json::object() : interventions;
  for (const auto& [field, value] : coordinates) {
    if (is_intervention_axis(field)) {
      flags[field.substr(intervention_prefix.size())] = value;
    } else {
      model::set_field(config, field, value, field);
    }
  }
  config.validate();
  return model::apply_interventions(config, model::parse_interventions(flags, "interventions"));
}

ScenarioSpec parse_scenario(const json& j) {
  allow_keys(j, "", {"schema_version", "configuration", "interventions", "replications", "horizon_days",
                     "warmup_days", "seed", "sweep", "outputs"});
  ScenarioSpec s;
  if (j.contains("schema_version") && j["schema_version"] != scenario_schema_version) {
    fail("schema_version", fmt::format("unsupported version (expected {})", scenario_schema_version));
  }
  if (!j.contains("configuration")) fail("configuration", "required");
  const auto& conf = j["configuration"];
  allow_keys(conf, "configuration", {"id", "overrides"});
  if (!conf.contains("id")) fail("configuration.id", "required");
  s.config_id = static_cast<int>(as_count(conf["id"], "configuration.id", 1));
  if (conf.contains("overrides")) s.overrides = conf["overrides"];
  if (j.contains("interventions")) s.interventions = j["interventions"];
  if (j.contains("replications")) s.replications = as_count(j["replications"], "replications", 1);
  if (j.contains("horizon_days")) s.horizon_days = as_days(j["horizon_days"], "horizon_days");
  if (j.contains("warmup_days")) s.warmup_days = as_days(j["warmup_days"], "warmup_days");
  if (!(s.horizon_days > s.warmup_days)) fail("horizon_days", "must exceed warmup_days");
  if (j.contains("seed")) s.seed = as_count(j["seed"], "seed", 0);

  if (j.contains("sweep")) {
    const auto& sw = j["sweep"];
    allow_keys(sw, "sweep", {"axes", "max_scenarios"});
    if (sw.contains("max_scenarios")) s.sweep_cap = as_count(sw["max_scenarios"], "sweep.max_scenarios", 1);
    if (sw.contains("axes")) {
      const auto& axes = sw["axes"];
      auto add_axis = [&](const std::string& field, const json& values, const std::string& path) {
        if (!values.is_array() || values.empty()) fail(path, "expected a nonempty array of values");
        for (const auto& a : s.axes) {
          if (a.field == field) fail(path, "axis repeats field '" + field + "'");
        }
        if (!is_intervention_axis(field) && !model::is_field(field)) {
          fail(path, "unknown configuration field '" + field + "'");
        }
        s.axes.push_back({field, values.get<std::vector<json>>()});
      };
      if (axes.is_object()) {
        for (const auto& [field, values] : axes.items()) add_axis(field, values, "sweep.axes." + field);
      } else if (axes.is_array()) {
        for (std::size_t i = 0; i < axes.size(); ++i) {
          const std::string path = fmt::format("sweep.axes[{}]", i);
          allow_keys(axes[i], path, {"field", "values"});
          if (!axes[i].contains("field") || !axes[i]["field"].is_string()) fail(path + ".field", "expected a string");
          if (!axes[i].contains("values")) fail(path + ".values", "required");
          add_axis(axes[i]["field"].get<std::string>(), axes[i]["values"], path + ".values");
        }
      } else {
        fail("sweep.axes", "expected an object or an array of {field, values}");
      }
    }
  }
  if (j.contains("outputs")) {
    const auto& out = j["outputs"];
    allow_keys(out, "outputs", {"csv", "json", "trace"});
    if (out.contains("csv")) s.csv_out = as_path(out["csv"], "outputs.csv");
    if (out.contains("json")) s.json_out = as_path(out["json"], "outputs.json");
    if (out.contains("trace")) s.trace_out = as_path(out["trace"], "outputs.trace");
  }

  // Bounded before anything is built.
  std::size_t count = 1;
  for (const auto& a : s.axes) {
    count *= a.values.size();
    if (count > s.sweep_cap) {
      fail("sweep", fmt::format("{} or more scenarios exceed max_scenarios {}", count, s.sweep_cap));
    }
  }

  try {
    (void)configure(s.config_id, s.overrides, s.interventions);
  } catch (const model::ConfigError& e) {
    throw ScenarioError(e.what());
  } catch (const std::invalid_argument& e) {
    fail("configuration", e.what());
  }
  for (std::size_t i = 0; i < s.axes.size(); ++i) {
    for (std::size_t k = 0; k < s.axes[i].values.size(); ++k) {
      try {
        (void)configure(s.config_id, s.overrides, s.interventions, {{s.axes[i].field, s.axes[i].values[k]}});
      } catch (const std::exception& e) {
        fail(fmt::format("sweep.axes[{}].values[{}]", i, k), e.what());
      }
    }
  }
  return s;
}

ScenarioSpec parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open scenario file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  return parse_scenario(j);
}

std::vector<Scenario> expand(const ScenarioSpec& spec) {
  const auto points = grid(spec);
  std::vector<Scenario> out;
  for (const auto& p : points) {
    out.push_back({p, configure(spec.config_id, spec.overrides, spec.interventions, p)});
  }
  return out;
}

std::vector<std::string> outcome_columns() {
  std::vector<std::string> cols;
  for (int m = 0; m < model::metric_count; ++m) cols.emplace_back(model::metric_name(static_cast<model::Metric>(m)));
  return cols;
}

void fill_outcomes(ResultTable::Row& row, const model::OutcomeReport& report) {
  for (int m = 0; m < model::metric_count; ++m) {
    const auto metric = static_cast<model::Metric>(m);
    Cell& c = row.cells[static_cast<std::size_t>(m)];
    c.applicable = report.applicable(metric);
    c.mean = c.applicable ? report[metric].mean : not_a_number;
    c.sd = c.applicable ? report[metric].sd : not_a_number;
  }
}

ResultTable run_sweep(const ScenarioSpec& spec, unsigned threads) {
  ResultTable t;
  t.id = "sweep";
  for (const auto& a : spec.axes) t.key_columns.push_back(a.field);
  t.value_columns = outcome_columns();

  const auto points = grid(spec);
  for (const auto& p : points) {
    std::vector<std::string> key;
    for (const auto& [field, v] : p) key.push_back(key_text(v));
    auto& row = t.add_row(key);
    try {
      const auto config = configure(spec.config_id, spec.overrides, spec.interventions, p);
      fill_outcomes(row, model::simulate(config, spec.replications, spec.horizon_days, spec.warmup_days,
                                         spec.seed, threads));
    } catch (const std::exception& e) {
      t.partial = true;
      t.errors.push_back(fmt::format("scenario {}: {}", key.empty() ? "base" : fmt::format("{}", fmt::join(key, "/")),
                                     e.what()));
    }
  }
  return t;
}

std::string trace_csv(const model::PhcConfiguration& config, const ScenarioSpec& spec) {
  std::vector<model::TraceRecord> records;
  (void)model::run_replication(config, sim::RunPlan{spec.horizon_days, spec.warmup_days,
                                                    sim::replication_seed(spec.seed, 0)},
                               &records);
  std::string out = "time,patient,class,resource,event\n";
  for (const auto& r : records) {
    out += fmt::format("{:.4f},{},{},{},{}\n", r.time, r.patient, model::class_name(r.patient_class), r.resource,
                       r.event);
  }
  return out;
}

}  // namespace phc::harness
