#include "phc/harness/analytics_file.hpp"

#include <set>

#include <fmt/format.h>

#include "phc/analytics/phc_adapter.hpp"
#include "phc/harness/scenario.hpp"

namespace phc::harness {

using nlohmann::json;
namespace an = phc::analytics;

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

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

an::JobClass parse_class(const json& j, const std::string& path) {
  allow_keys(j, path, {"arrival_rate", "service_mean", "service_variance", "servers"});
  an::JobClass c;
  if (!j.contains("arrival_rate")) fail(path + ".arrival_rate", "required");
  if (!j.contains("service_mean")) fail(path + ".service_mean", "required");
  c.arrival_rate = number(j["arrival_rate"], path + ".arrival_rate");
  c.service_mean = number(j["service_mean"], path + ".service_mean");
  if (j.contains("service_variance")) c.service_variance = number(j["service_variance"], path + ".service_variance");
  if (j.contains("servers")) {
    if (!j["servers"].is_number_integer()) fail(path + ".servers", "expected an integer");
    c.servers = j["servers"].get<int>();
  }
  try {
    c.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return c;
}

an::Setup parse_setup(const json& j, const std::string& path) {
  allow_keys(j, path, {"service_mean", "jobs_per_setup", "service_variance"});
  an::Setup s;
  if (!j.contains("service_mean")) fail(path + ".service_mean", "required");
  if (!j.contains("jobs_per_setup")) fail(path + ".jobs_per_setup", "required");
  s.service_mean = number(j["service_mean"], path + ".service_mean");
  s.jobs_per_setup = number(j["jobs_per_setup"], path + ".jobs_per_setup");
  if (j.contains("service_variance")) s.service_variance = number(j["service_variance"], path + ".service_variance");
  return s;
}

void add(ResultTable& t, const std::string& name, double v) {
  t.add_row({name}).cells[0] = Cell{v, not_a_number, true, std::nullopt};
}

}  // namespace

ResultTable run_analytics(const json& input) {
  allow_keys(input, "", {"classes", "dominant", "setups", "configuration", "window_fraction", "replications",
                         "alpha"});
  std::vector<an::JobClass> classes;
  std::vector<an::Setup> setups;
  std::size_t dominant = 0;
  std::optional<double> wait;

  if (input.contains("configuration")) {
    if (input.contains("classes") || input.contains("setups") || input.contains("dominant")) {
      fail("configuration", "give either a configuration or explicit classes, not both");
    }
    const auto& conf = input["configuration"];
    allow_keys(conf, "configuration", {"id", "overrides"});
    if (!conf.contains("id") || !conf["id"].is_number_integer()) fail("configuration.id", "expected an integer");
    const double f = input.contains("window_fraction") ? number(input["window_fraction"], "window_fraction")
                                                       : an::default_window_fraction;
    model::PhcConfiguration config;
    try {
      config = model::build_configuration(conf["id"].get<int>(), conf.value("overrides", json::object()),
                                          "configuration.overrides");
    } catch (const std::exception& e) {
      throw ScenarioError(e.what());
    }
    const auto inst = an::doctor_instance(config, f);
    classes = inst.classes;
    setups = inst.setups;
    dominant = inst.dominant;
    wait = an::doctor_wait_estimate(inst);
  } else {
    if (input.contains("window_fraction")) fail("window_fraction", "applies only to a configuration");
    if (!input.contains("classes") || !input["classes"].is_array() || input["classes"].empty()) {
      fail("classes", "expected a nonempty array");
    }
    for (std::size_t i = 0; i < input["classes"].size(); ++i) {
      classes.push_back(parse_class(input["classes"][i], fmt::format("classes[{}]", i)));
    }
    if (input.contains("dominant")) {
      if (!input["dominant"].is_number_unsigned() || input["dominant"].get<std::size_t>() >= classes.size()) {
        fail("dominant", "expected an index into classes");
      }
      dominant = input["dominant"].get<std::size_t>();
    }
    if (input.contains("setups")) {
      if (!input["setups"].is_array()) fail("setups", "expected an array");
      for (std::size_t i = 0; i < input["setups"].size(); ++i) {
        setups.push_back(parse_setup(input["setups"][i], fmt::format("setups[{}]", i)));
      }
    } else {
      setups = an::setups_from(classes, dominant);
    }
  }

  std::vector<double> reps;
  if (input.contains("replications")) {
    if (!input["replications"].is_array()) fail("replications", "expected an array of utilizations");
    for (std::size_t i = 0; i < input["replications"].size(); ++i) {
      reps.push_back(number(input["replications"][i], fmt::format("replications[{}]", i)));
    }
  }
  const double alpha = input.contains("alpha") ? number(input["alpha"], "alpha") : 0.05;
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha", "expected a probability in (0, 1)");

  an::ApproximationReport r;
  try {
    r = an::approximation_report(classes, dominant, setups, reps, alpha);
  } catch (const std::exception& e) {
    fail("replications", e.what());
  }

  ResultTable t;
  t.id = "analytics";
  t.key_columns = {"quantity"};
  t.value_columns = {"value"};
  add(t, "rho_a", r.rho_a);
  add(t, "rho_1", r.rho_1);
  add(t, "rho_ap", r.rho_ap);
  add(t, "d_1", r.d_1);
  add(t, "effective_service_time", an::effective_service_time(classes[dominant].service_mean, setups));
  if (wait) add(t, "doctor_wait_estimate", *wait);
  if (r.dominant_class_suffices) add(t, "dominant_class_suffices", *r.dominant_class_suffices ? 1.0 : 0.0);
  if (r.setup_interval) {
    add(t, "setup_interval_lo", r.setup_interval->lo);
    add(t, "setup_interval_hi", r.setup_interval->hi);
  }
  if (r.setup_interval_holds) add(t, "setup_interval_holds", *r.setup_interval_holds ? 1.0 : 0.0);
  for (const auto& [name, test] : {std::pair{"rho_a", r.rho_a_test}, std::pair{"rho_1", r.rho_1_test},
                                   std::pair{"rho_ap", r.rho_ap_test}}) {
    if (!test) continue;
    add(t, fmt::format("{}_t", name), test->t);
    add(t, fmt::format("{}_p_value", name), test->p);
  }
  return t;
}

}  // namespace phc::harness
