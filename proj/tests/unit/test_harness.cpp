#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "phc/harness/analytics_file.hpp"
#include "phc/harness/reproduce.hpp"
#include "phc/harness/scenario.hpp"

using namespace phc::harness;
using nlohmann::json;

namespace {

std::string error_of(const json& j) {
  try {
    (void)parse_scenario(j);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

Profile tiny() {
  Profile p;
  p.replications = 2;
  p.horizon_days = 30.0;
  p.warmup_days = 10.0;
  p.threads = 1;
  return p;
}

ResultTable sample_table() {
  ResultTable t;
  t.id = "sample";
  t.key_columns = {"scenario", "note"};
  t.value_columns = {"a", "b"};
  auto& r1 = t.add_row({"x", "has, comma"});
  r1.cells[0] = Cell{0.123456789, 0.000123456789, true, Target{0.12, CheckKind::band, 0.01, "t:x:a"}};
  r1.cells[1] = Cell{1234567.891, 0.0, true, std::nullopt};
  auto& r2 = t.add_row({"y", "quote \" inside"});
  r2.cells[0] = Cell{-2.5e-9, not_a_number, true, Target{0.5, CheckKind::reference, 0.0, "t:y:a"}};
  r2.cells[1] = Cell{not_a_number, not_a_number, false, std::nullopt};
  return t;
}

void check_same_grid(const ResultTable& a, const ResultTable& b) {
  REQUIRE(a.key_columns == b.key_columns);
  REQUIRE(a.value_columns == b.value_columns);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    CHECK(a.rows[r].key == b.rows[r].key);
    for (std::size_t c = 0; c < a.value_columns.size(); ++c) {
      const Cell& x = a.rows[r].cells[c];
      const Cell& y = b.rows[r].cells[c];
      CHECK(x.applicable == y.applicable);
      CHECK(((std::isnan(x.mean) && std::isnan(y.mean)) || x.mean == y.mean));
      CHECK(((std::isnan(x.sd) && std::isnan(y.sd)) || x.sd == y.sd));
      CHECK(x.target == y.target);
    }
  }
}

}  // namespace

TEST_CASE("minimal scenario takes the defaults") {
  const auto s = parse_scenario(json{{"configuration", {{"id", 1}}}});
  CHECK(s.config_id == 1);
  CHECK(s.replications == 100);
  CHECK(s.horizon_days == 365.0);
  CHECK(s.warmup_days == 180.0);
  CHECK(s.seed == default_seed);
  CHECK(s.axes.empty());
  CHECK(s.scenario_count() == 1);
  CHECK(expand(s).size() == 1);
}

TEST_CASE("sweep axes form a Cartesian grid") {
  const auto s = parse_scenario(json::parse(R"({
    "configuration": {"id": 1},
    "sweep": {"axes": {"consult_mean": [0.87, 2.5, 5], "opd_iat": [3, 6, 9]}}})"));
  CHECK(s.scenario_count() == 9);
  const auto grid = expand(s);
  REQUIRE(grid.size() == 9);
  std::set<std::pair<double, double>> points;
  for (const auto& sc : grid) {
    points.insert({sc.coordinates[0].second.get<double>(), sc.coordinates[1].second.get<double>()});
    CHECK(*sc.config.opd_interarrival_mean == sc.coordinates[1].second.get<double>());
  }
  CHECK(points.size() == 9);
}

TEST_CASE("scenario errors name the field") {
  CHECK(error_of(json{{"configuration", {{"id", 3}, {"overrides", {{"childbirth_iat", 1440}}}}}})
            .starts_with("configuration.overrides.childbirth_iat"));
  CHECK(error_of(json{{"configuration", {{"id", 1}}}, {"replicas", 3}}).starts_with("replicas: unknown key"));
  CHECK(error_of(json{{"configuration", {{"id", 1}, {"extra", 1}}}}).starts_with("configuration.extra"));
  CHECK(error_of(json{{"configuration", {{"id", 1}}}, {"replications", "ten"}}).starts_with("replications"));
  CHECK(error_of(json{{"configuration", {{"id", 1}}}, {"replications", 0}}).starts_with("replications"));
  CHECK(error_of(json{{"configuration", {{"id", 1}}}, {"horizon_days", 100}, {"warmup_days", 200}})
            .starts_with("horizon_days"));
  CHECK(error_of(json{{"configuration", {{"id", 7}}}}).starts_with("config_id"));
  CHECK(error_of(json{{"schema_version", 2}, {"configuration", {{"id", 1}}}}).starts_with("schema_version"));
  CHECK(error_of(json::object()).starts_with("configuration"));
  CHECK(error_of(json::parse(R"({"configuration": {"id": 1}, "sweep": {"axes": {"no_such": [1]}}})"))
            .starts_with("sweep.axes.no_such"));
  CHECK(error_of(json::parse(R"({"configuration": {"id": 1}, "sweep": {"axes": [{"field": "opd_iat", "values": []}]}})"))
            .starts_with("sweep.axes[0].values"));
  CHECK(error_of(json::parse(R"({"configuration": {"id": 1},
                                 "sweep": {"axes": [{"field": "p_age_30_plus", "values": [0.5, 1.5]}]}})"))
            .starts_with("sweep.axes[0].values[1]"));
  CHECK(error_of(json::parse(R"({"configuration": {"id": 3},
                                 "sweep": {"axes": [{"field": "childbirth_per_day", "values": [1, 2]}]}})"))
            .starts_with("sweep.axes[0].values[0]"));
  CHECK(error_of(json::parse(R"({"configuration": {"id": 1},
                                 "sweep": {"axes": [{"field": "interventions.no_such", "values": [true]}]}})"))
            .starts_with("sweep.axes[0].values[0]"));
  CHECK(error_of(json::parse(R"({"configuration": {"id": 1}, "outputs": {"png": "x"}})")).starts_with("outputs.png"));
}

TEST_CASE("sweeps beyond the cap are rejected before running") {
  json j = json::parse(R"({"configuration": {"id": 1}, "sweep": {"max_scenarios": 8,
                           "axes": {"consult_mean": [1, 2, 3], "opd_iat": [3, 4, 5]}}})");
  CHECK(error_of(j).starts_with("sweep:"));
  j["sweep"]["max_scenarios"] = 9;
  CHECK(parse_scenario(j).scenario_count() == 9);
}

TEST_CASE("scenario files") {
  const auto dir = std::filesystem::temp_directory_path() / "phc_harness_test";
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.json";
  std::ofstream(good) << R"({"configuration": {"id": 2}, "seed": 7, "outputs": {"csv": "out.csv"}})";
  const auto s = parse_scenario_file(good);
  CHECK(s.config_id == 2);
  CHECK(s.seed == 7);
  CHECK(s.csv_out == std::filesystem::path("out.csv"));
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_AS((void)parse_scenario_file(bad), ScenarioError);
  CHECK_THROWS_AS((void)parse_scenario_file(dir / "missing.json"), ScenarioError);
}

TEST_CASE("a single-scenario sweep equals simulate") {
  auto s = parse_scenario(json{{"configuration", {{"id", 2}}}, {"replications", 3}, {"horizon_days", 40},
                               {"warmup_days", 10}, {"seed", 99}});
  const auto t = run_sweep(s, 1);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].key.empty());
  const auto direct = phc::model::simulate(phc::model::build_configuration(2), 3, 40, 10, 99, 1);
  for (int m = 0; m < phc::model::metric_count; ++m) {
    const auto metric = static_cast<phc::model::Metric>(m);
    const Cell& c = t.rows[0].cells[static_cast<std::size_t>(m)];
    CHECK(c.mean == direct[metric].mean);
    CHECK(c.sd == direct[metric].sd);
  }
}

TEST_CASE("failing scenarios are isolated and the table is marked partial") {
  ScenarioSpec s;
  s.config_id = 1;
  s.replications = 1;
  s.horizon_days = 20;
  s.warmup_days = 5;
  s.axes = {{"n_inpatient_beds", {6, 2}}, {"interventions.extra_labour_beds", {0, 3}}};
  const auto t = run_sweep(s, 1);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.partial);
  REQUIRE(t.errors.size() == 1);
  CHECK(t.errors[0].find("2/3") != std::string::npos);
  CHECK(std::isnan(t.at({"2", "3"}, "doctor_utilization").mean));
  CHECK_FALSE(std::isnan(t.at({"2", "0"}, "doctor_utilization").mean));
  CHECK_FALSE(std::isnan(t.at({"6", "3"}, "doctor_utilization").mean));
}

TEST_CASE("common random numbers: a consult change leaves every arrival in place") {
  auto s = parse_scenario(json{{"configuration", {{"id", 1}}}, {"horizon_days", 30}, {"warmup_days", 10}});
  auto arrivals = [&](double consult) {
    const auto config = configure(1, json{{"consult_mean", consult}}, json::object());
    std::vector<phc::model::TraceRecord> records;
    (void)phc::model::run_replication(config, phc::sim::RunPlan{30, 10, phc::sim::replication_seed(s.seed, 0)},
                                      &records);
    std::vector<std::pair<double, int>> out;
    for (const auto& r : records) {
      if (r.event == "arrive") out.emplace_back(r.time, static_cast<int>(r.patient_class));
    }
    return out;
  };
  const auto a = arrivals(0.87), b = arrivals(5.0);
  CHECK(a.size() > 1000);
  CHECK(a == b);
}

TEST_CASE("trace lines carry time, patient, class, resource and event") {
  auto s = parse_scenario(json{{"configuration", {{"id", 3}}}, {"horizon_days", 3}, {"warmup_days", 1}});
  const auto text = trace_csv(configure(3, json::object(), json::object()), s);
  CHECK(text.starts_with("time,patient,class,resource,event\n"));
  CHECK(text.find(",outpatient,doctor,start\n") != std::string::npos);
}

TEST_CASE("cell comparisons") {
  Cell c{1.0, 0.1, true, Target{1.04, CheckKind::band, 0.05, "x"}};
  CHECK(c.pass() == true);
  CHECK(c.abs_delta() == doctest::Approx(-0.04));
  CHECK(c.rel_delta() == doctest::Approx(-0.04 / 1.04));
  c.target->tolerance = 0.01;
  CHECK(c.pass() == false);
  c.target = Target{1.0, CheckKind::at_most, 0, "x"};
  CHECK(c.pass() == true);
  c.target = Target{1.0001, CheckKind::at_least, 0, "x"};
  CHECK(c.pass() == false);
  c = Cell{0.104634, not_a_number, true, Target{0.1042, CheckKind::rounds_to, 4, "x"}};
  CHECK(c.pass() == false);
  c.mean = 0.10424;
  CHECK(c.pass() == true);
  c.target->kind = CheckKind::reference;
  CHECK_FALSE(c.pass().has_value());
  c = Cell{not_a_number, not_a_number, false, Target{1.0, CheckKind::band, 1.0, "x"}};
  CHECK_FALSE(c.pass().has_value());
  CHECK(std::isnan(c.abs_delta()));
  CHECK_FALSE(Cell{}.pass().has_value());
}

TEST_CASE("numbers export at six significant digits") {
  CHECK(format_number(0.123456789) == "0.123457");
  CHECK(format_number(1234567.891) == "1.23457e+06");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(not_a_number) == "nan");
  CHECK(round_sig6(0.123456789) == 0.123457);
}

TEST_CASE("csv export round-trips") {
  const auto t = sample_table();
  const auto csv = to_csv(t);
  const auto back = table_from_csv(csv);
  check_same_grid(back, rounded(t));
  CHECK(to_csv(back) == csv);
  CHECK(csv.find("\"has, comma\"") != std::string::npos);
  CHECK(csv.find(",NA,NA") != std::string::npos);
}

TEST_CASE("json export round-trips") {
  auto t = sample_table();
  t.checks.push_back({"trend", "t:trend", false, "detail"});
  t.partial = true;
  t.errors = {"one failed"};
  const auto j = to_json(t);
  CHECK(j["comparisons"] == 2);
  CHECK(j["failures"] == 1);
  const auto back = table_from_json(json::parse(j.dump()));
  check_same_grid(back, rounded(t));
  CHECK(back.checks == t.checks);
  CHECK(back.partial);
  CHECK(back.errors == t.errors);
  CHECK(to_json(back).dump() == j.dump());
}

TEST_CASE("an empty table exports a header-only csv") {
  ResultTable t;
  t.key_columns = {"k"};
  t.value_columns = {"doctor_utilization"};
  CHECK(to_csv(t) == "k,doctor_utilization,doctor_utilization:sd\n");
  const auto back = table_from_csv(to_csv(t));
  CHECK(back.rows.empty());
  CHECK(back.key_columns == t.key_columns);
  CHECK(back.value_columns == t.value_columns);
}

TEST_CASE("malformed csv and unwritable paths are reported") {
  CHECK_THROWS((void)table_from_csv(""));
  CHECK_THROWS((void)table_from_csv("k,a,a:sd\nx,1\n"));
  CHECK_THROWS((void)table_from_csv("k,a,a:sd\nx,one,0\n"));
  CHECK_THROWS((void)table_from_csv("k,a,a:sd\n\"x,1,0\n"));
  CHECK_THROWS_AS(write_file("/nonexistent-dir/out.csv", "x"), std::runtime_error);
  CHECK_THROWS((void)format_from_name("xml"));
}

TEST_CASE("analytic exhibits carry the published values") {
  const auto t5 = table5_analytic();
  CHECK(t5.at({"config_1"}, "rho_a").pass() == true);
  CHECK(t5.at({"config_3"}, "rho_a").pass() == true);
  CHECK(t5.at({"benchmark"}, "rho_a").pass() == true);
  const auto c1 = table_c1_analytic();
  for (const auto& row : configuration_rows()) {
    CHECK(c1.at({row}, "rho_o").pass() == true);
    CHECK(c1.at({row}, "rho_ap").pass() == true);
    CHECK(c1.at({row}, "rho_ap").mean >= c1.at({row}, "rho_o").mean);
  }
}

TEST_CASE("operational outcome table has fourteen outcomes by four configurations") {
  const auto t = reproduce("table6", tiny());
  CHECK(t.rows.size() == 14);
  CHECK(t.value_columns.size() == 4);
  CHECK_FALSE(t.at({"labour_bed_utilization"}, "config_3").applicable);
  CHECK_FALSE(t.at({"referral_fraction"}, "config_3").applicable);
  CHECK(t.at({"doctor_utilization"}, "config_3").target->value == 0.354);
}

TEST_CASE("every target cell names its exhibit coordinate") {
  for (const auto& id : {"table6", "fig4"}) {
    const auto t = reproduce(id, tiny());
    for (const auto& r : t.rows) {
      for (const auto& c : r.cells) {
        if (!c.target) continue;
        CHECK(std::count(c.target->exhibit.begin(), c.target->exhibit.end(), ':') == 2);
      }
    }
    for (const auto& c : t.checks) CHECK_FALSE(c.exhibit.empty());
  }
}

TEST_CASE("reproduce is deterministic to the byte") {
  const auto a = reproduce("fig4", tiny());
  const auto b = reproduce("fig4", tiny());
  CHECK(to_csv(a) == to_csv(b));
  CHECK(render(a, Format::json) == render(b, Format::json));
  auto threaded = tiny();
  threaded.threads = 2;
  CHECK(to_csv(reproduce("fig4", threaded)) == to_csv(a));
  CHECK(a.checks.size() == 3);
}

TEST_CASE("profiles and exhibit ids") {
  const auto fast = fast_profile();
  CHECK(fast.replications == 20);
  CHECK(fast.horizon_days == 185.0);
  CHECK(fast.warmup_days == 60.0);
  CHECK(fast.tolerance_scale == 2.0);
  CHECK(full_profile().replications == 100);
  for (const auto* id : {"table5", "table6", "tableC1", "fig2", "fig3", "fig4"}) CHECK(is_exhibit(id));
  CHECK_THROWS_AS((void)reproduce("table7", tiny()), std::invalid_argument);
}

TEST_CASE("standalone analytics") {
  const auto classes = run_analytics(json::parse(R"({
    "classes": [{"arrival_rate": 0.09, "service_mean": 1, "servers": 1},
                {"arrival_rate": 0.01, "service_mean": 1, "servers": 1}],
    "replications": [0.1, 0.11, 0.09, 0.1]})"));
  CHECK(classes.at({"d_1"}, "value").mean == doctest::Approx(0.9));
  CHECK(classes.at({"rho_a"}, "value").mean == doctest::Approx(0.1));
  CHECK(classes.find_row({"rho_a_p_value"}) != nullptr);
  const auto phc = run_analytics(json::parse(R"({"configuration": {"id": 1, "overrides": {"validation_mode": true}}})"));
  CHECK(phc.at({"rho_ap"}, "value").mean == doctest::Approx(0.1129).epsilon(1e-3));
  CHECK(phc.find_row({"doctor_wait_estimate"}) != nullptr);
  CHECK(phc.find_row({"rho_a_p_value"}) == nullptr);

  auto err = [](const char* text) -> std::string {
    try {
      (void)run_analytics(json::parse(text));
    } catch (const ScenarioError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(err(R"({"classes": []})").starts_with("classes"));
  CHECK(err(R"({"classes": [{"arrival_rate": 1}]})").starts_with("classes[0].service_mean"));
  CHECK(err(R"({"classes": [{"arrival_rate": -1, "service_mean": 1}]})").starts_with("classes[0]"));
  CHECK(err(R"({"classes": [{"arrival_rate": 1, "service_mean": 1}], "dominant": 3})").starts_with("dominant"));
  CHECK(err(R"({"configuration": {"id": 1}, "classes": []})").starts_with("configuration"));
  CHECK(err(R"({"configuration": {"id": 9}})").starts_with("config_id"));
  CHECK(err(R"({"classes": [{"arrival_rate": 1, "service_mean": 0.5}], "bogus": 1})").starts_with("bogus"));
}
