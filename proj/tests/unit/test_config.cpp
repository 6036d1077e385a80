#include <doctest.h>

#include <variant>

#include "phc/model/config.hpp"

using namespace phc::model;
using nlohmann::json;

TEST_CASE("configuration 1 defaults") {
  const auto c = build_configuration(1);
  CHECK(c.opd_interarrival_mean == 4.0);
  CHECK(c.ipd_interarrival_mean == 2880.0);
  CHECK(c.childbirth_interarrival_mean == 1440.0);
  CHECK(c.anc_interarrival_mean == 1440.0);
  CHECK(c.n_doctors == 2);
  CHECK(c.n_inpatient_beds == 6);
  CHECK(c.n_labour_beds == 1);
  CHECK(c.n_staff_nurses == 4);
  CHECK(c.referral_threshold == 120.0);
  CHECK(c.opd_window.open_minute == 480.0);
  CHECK(c.opd_window.close_minute == 840.0);
  CHECK(c.p_followup_two_visits == 0.20);
  CHECK(c.p_followup_three_visits == 0.10);
  const auto& consult = std::get<phc::sim::Normal>(c.doctor_opd_consult);
  CHECK(consult.mean == 0.87);
  CHECK(consult.sd == 0.21);
}

TEST_CASE("configurations 2 and 3 share loads except childbirth and ANC") {
  const auto c2 = build_configuration(2);
  const auto c3 = build_configuration(3);
  CHECK(c2.opd_interarrival_mean == 9.0);
  CHECK(c2.childbirth_interarrival_mean == 2880.0);
  CHECK(c2.anc_interarrival_mean == 2880.0);
  CHECK(c2.n_doctors == 1);
  CHECK(c3.opd_interarrival_mean == 9.0);
  CHECK(c3.ipd_interarrival_mean == 2880.0);
  CHECK_FALSE(c3.childbirth_enabled());
  CHECK_FALSE(c3.anc_enabled());
  CHECK(c3.n_doctors == 1);
}

TEST_CASE("benchmark uses a five minute consult with lower bound two") {
  const auto c = build_configuration(4);
  CHECK(c.opd_interarrival_mean == 3.0);
  CHECK(c.n_doctors == 2);
  const auto& consult = std::get<phc::sim::Normal>(c.doctor_opd_consult);
  CHECK(consult.mean == 5.0);
  CHECK(consult.sd == 1.0);
  CHECK(consult.lower_bound == 2.0);
}

TEST_CASE("overrides apply and round-trip through field access") {
  const auto c = build_configuration(1, json{{"opd_iat", 6.0}, {"ipd_per_day", 2.0}, {"consult_mean", 5.0}});
  CHECK(c.opd_interarrival_mean == 6.0);
  CHECK(c.ipd_interarrival_mean == doctest::Approx(720.0));
  CHECK(get_field(c, "ipd_per_day").get<double>() == doctest::Approx(2.0));
  CHECK(std::get<phc::sim::Normal>(c.doctor_opd_consult).lower_bound == doctest::Approx(2.0));
  const auto again = build_configuration(1, json{{"opd_first_visits_per_day", 120.0}});
  CHECK(again.opd_interarrival_mean == doctest::Approx(3.0));

  const auto d = build_configuration(2, json{{"lab_service", {{"kind", "uniform"}, {"min", 2}, {"max", 4}}}});
  const auto& u = std::get<phc::sim::Uniform>(d.lab_service);
  CHECK(u.min == 2.0);
  CHECK(u.max == 4.0);
  CHECK(to_json(d)["lab_service"] == json{{"kind", "uniform"}, {"min", 2.0}, {"max", 4.0}});
}

TEST_CASE("every registered field reads back what it was set to") {
  auto c = build_configuration(1);
  for (const auto& name : field_names()) {
    const json before = get_field(c, name);
    auto copy = c;
    set_field(copy, name, before, name);
    CHECK_MESSAGE(get_field(copy, name) == before, name);
  }
}

TEST_CASE("consult interpolation hits both published endpoints") {
  const auto lo = std::get<phc::sim::Normal>(consult_with_mean(0.87));
  const auto hi = std::get<phc::sim::Normal>(consult_with_mean(5.0));
  const auto mid = std::get<phc::sim::Normal>(consult_with_mean(2.5));
  CHECK(lo.sd == doctest::Approx(0.21));
  CHECK(lo.lower_bound == doctest::Approx(0.5));
  CHECK(hi.sd == doctest::Approx(1.0));
  CHECK(hi.lower_bound == doctest::Approx(2.0));
  CHECK(mid.sd == doctest::Approx(0.5216).epsilon(1e-3));
  CHECK(mid.lower_bound == doctest::Approx(1.0920).epsilon(1e-3));
}

TEST_CASE("configuration errors name the offending field") {
  auto path_of = [](auto&& f) -> std::string {
    try {
      f();
    } catch (const ConfigError& e) {
      return e.path();
    }
    return "<no error>";
  };
  CHECK(path_of([] { (void)build_configuration(5); }) == "config_id");
  CHECK(path_of([] { (void)build_configuration(1, json{{"no_such_field", 1}}); }) == "overrides.no_such_field");
  CHECK(path_of([] { (void)build_configuration(1, json{{"p_age_30_plus", 1.5}}); }) == "p_age_30_plus");
  CHECK(path_of([] { (void)build_configuration(1, json{{"p_lab_referral", "x"}}); }) ==
        "overrides.p_lab_referral");
  CHECK(path_of([] {
          (void)build_configuration(1, json{{"p_followup_two_visits", 0.7}, {"p_followup_three_visits", 0.5}});
        }) == "p_followup_three_visits");
  CHECK(path_of([] { (void)build_configuration(3, json{{"childbirth_iat", 1440}}); }) ==
        "overrides.childbirth_iat");
  CHECK(path_of([] { (void)build_configuration(3, json{{"anc_per_day", 1}}); }) == "overrides.anc_per_day");
  CHECK(path_of([] { (void)build_configuration(1, json{{"lab_service", {{"kind", "gamma"}}}}); }) ==
        "overrides.lab_service.kind");
  CHECK(path_of([] { (void)build_configuration(1, json{{"n_doctors", 0}}); }) == "n_doctors");
}

TEST_CASE("interventions adjust the configuration") {
  const auto base = build_configuration(4);
  const auto f = parse_interventions(json{{"nurse_takes_doctor_admin", true},
                                          {"childbirth_mix", true},
                                          {"extra_doctor", true},
                                          {"nurse_assists_ncd", true}});
  CHECK(f.mix.p_none == 0.5);
  CHECK(f.mix.p_one_third == 0.3);
  CHECK(f.mix.p_full == 0.2);
  CHECK(f.nurse_assists_ncd_fraction == 0.10);
  const auto c = apply_interventions(base, f);
  CHECK(c.n_doctors == 3);
  CHECK(c.interventions.nurse_takes_doctor_admin);

  InterventionFlags beds;
  beds.extra_labour_beds = 1;
  const auto b = apply_interventions(build_configuration(1), beds);
  CHECK(b.n_labour_beds == 2);
  CHECK(b.n_inpatient_beds == 5);

  InterventionFlags too_many;
  too_many.extra_labour_beds = 6;
  CHECK_THROWS_AS((void)apply_interventions(build_configuration(1), too_many), ConfigError);
  CHECK_THROWS_AS((void)apply_interventions(build_configuration(3), beds), ConfigError);

  CHECK_THROWS_AS((void)parse_interventions(json{{"childbirth_mix", {0.5, 0.5, 0.5}}}), ConfigError);
  CHECK_THROWS_AS((void)parse_interventions(json{{"teleport", true}}), ConfigError);

  InterventionFlags override_beds;
  override_beds.inpatient_bed_count_override = 3;
  CHECK(apply_interventions(build_configuration(1), override_beds).n_inpatient_beds == 3);
}

TEST_CASE("zero loads disable arrival classes") {
  const auto c = build_configuration(
      1, json{{"opd_first_visits_per_day", 0}, {"ipd_per_day", 0}, {"childbirth_per_day", 0}, {"anc_per_day", 0}});
  CHECK_FALSE(c.opd_enabled());
  CHECK_FALSE(c.ipd_interarrival_mean.has_value());
  CHECK_FALSE(c.childbirth_enabled());
  CHECK_FALSE(c.anc_enabled());
}
