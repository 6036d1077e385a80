#include "phc/model/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace phc::model {
namespace {

using nlohmann::json;

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) {
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<int>(v.get<double>());
    throw ConfigError(path, "expected an integer");
  }
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
  return v.get<bool>();
}

void check_probability(double p, const std::string& path) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(path, "probability must lie in [0, 1]");
}

void check_positive(double x, const std::string& path) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(path, "must be positive");
}

void check_distribution(const DistributionSpec& d, const std::string& path) {
  try {
    sim::validate(d);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

// Per-day load (cases/day) to a 24-hour interarrival mean; 0 disables.
std::optional<double> per_day_to_iat(double per_day, const std::string& path) {
  if (!(per_day >= 0.0)) throw ConfigError(path, "load must be nonnegative");
  if (per_day == 0.0) return std::nullopt;
  return sim::minutes_per_day / per_day;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct Field {
  std::string name;
  bool childbirth_only;
  std::function<void(PhcConfiguration&, const json&, const std::string&)> set;
  std::function<json(const PhcConfiguration&)> get;
};

Field distribution_field(std::string name, DistributionSpec PhcConfiguration::*member,
                         bool childbirth_only = false) {
  return {std::move(name), childbirth_only,
          [member](PhcConfiguration& c, const json& v, const std::string& p) {
            c.*member = parse_distribution(v, p);
          },
          [member](const PhcConfiguration& c) { return to_json(c.*member); }};
}

Field number_field(std::string name, double PhcConfiguration::*member) {
  return {std::move(name), false,
          [member](PhcConfiguration& c, const json& v, const std::string& p) { c.*member = as_number(v, p); },
          [member](const PhcConfiguration& c) { return json(c.*member); }};
}

Field int_field(std::string name, int PhcConfiguration::*member, bool childbirth_only = false) {
  return {std::move(name), childbirth_only,
          [member](PhcConfiguration& c, const json& v, const std::string& p) { c.*member = as_int(v, p); },
          [member](const PhcConfiguration& c) { return json(c.*member); }};
}

Field bool_field(std::string name, bool PhcConfiguration::*member) {
  return {std::move(name), false,
          [member](PhcConfiguration& c, const json& v, const std::string& p) { c.*member = as_bool(v, p); },
          [member](const PhcConfiguration& c) { return json(c.*member); }};
}

Field optional_iat_field(std::string name, std::optional<double> PhcConfiguration::*member,
                         bool childbirth_only) {
  return {std::move(name), childbirth_only,
          [member](PhcConfiguration& c, const json& v, const std::string& p) {
            if (v.is_null()) {
              c.*member = std::nullopt;
              return;
            }
            c.*member = as_number(v, p);
          },
          [member](const PhcConfiguration& c) { return optional_number(c.*member); }};
}

Field per_day_field(std::string name, std::optional<double> PhcConfiguration::*member,
                    bool childbirth_only) {
  return {std::move(name), childbirth_only,
          [member](PhcConfiguration& c, const json& v, const std::string& p) {
            c.*member = per_day_to_iat(as_number(v, p), p);
          },
          [member](const PhcConfiguration& c) {
            const auto& iat = c.*member;
            return iat ? json(sim::minutes_per_day / *iat) : json(0.0);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    using C = PhcConfiguration;
    std::vector<Field> f;
    f.push_back(optional_iat_field("opd_iat", &C::opd_interarrival_mean, false));
    f.push_back(optional_iat_field("ipd_iat", &C::ipd_interarrival_mean, false));
    f.push_back(optional_iat_field("childbirth_iat", &C::childbirth_interarrival_mean, true));
    f.push_back(optional_iat_field("anc_iat", &C::anc_interarrival_mean, true));
    f.push_back(per_day_field("ipd_per_day", &C::ipd_interarrival_mean, false));
    f.push_back(per_day_field("childbirth_per_day", &C::childbirth_interarrival_mean, true));
    f.push_back(per_day_field("anc_per_day", &C::anc_interarrival_mean, true));
    f.push_back({"opd_first_visits_per_day", false,
                 [](C& c, const json& v, const std::string& p) {
                   const double x = as_number(v, p);
                   if (!(x >= 0.0)) throw ConfigError(p, "load must be nonnegative");
                   if (x == 0.0) c.opd_interarrival_mean.reset();
                   else c.opd_interarrival_mean = c.opd_window.window_length() / x;
                 },
                 [](const C& c) {
                   return c.opd_interarrival_mean ? json(c.opd_window.window_length() / *c.opd_interarrival_mean)
                                                  : json(0.0);
                 }});
    f.push_back(int_field("n_doctors", &C::n_doctors));
    f.push_back(int_field("n_staff_nurses", &C::n_staff_nurses));
    f.push_back(int_field("n_inpatient_beds", &C::n_inpatient_beds));
    f.push_back(int_field("n_labour_beds", &C::n_labour_beds, true));
    f.push_back(distribution_field("doctor_opd_consult", &C::doctor_opd_consult));
    f.push_back({"consult_mean", false,
                 [](C& c, const json& v, const std::string& p) {
                   const double m = as_number(v, p);
                   check_positive(m, p);
                   c.doctor_opd_consult = consult_with_mean(m);
                 },
                 [](const C& c) { return json(sim::nominal_mean(c.doctor_opd_consult)); }});
    f.push_back(distribution_field("pharmacy_service", &C::pharmacy_service));
    f.push_back(distribution_field("lab_service", &C::lab_service));
    f.push_back(distribution_field("ncd_check", &C::ncd_check));
    f.push_back(distribution_field("doctor_inpatient", &C::doctor_inpatient));
    f.push_back(distribution_field("nurse_inpatient", &C::nurse_inpatient));
    f.push_back(distribution_field("nurse_childbirth", &C::nurse_childbirth, true));
    f.push_back(distribution_field("doctor_childbirth", &C::doctor_childbirth, true));
    f.push_back(distribution_field("inpatient_bed_stay", &C::inpatient_bed_stay));
    f.push_back(distribution_field("labour_bed_stay", &C::labour_bed_stay, true));
    f.push_back(distribution_field("postdelivery_bed_stay", &C::postdelivery_bed_stay, true));
    f.push_back(distribution_field("anc_nurse", &C::anc_nurse, true));
    f.push_back(distribution_field("lab_report_delay", &C::lab_report_delay));
    f.push_back(number_field("p_age_30_plus", &C::p_age_30_plus));
    f.push_back(number_field("p_lab_referral", &C::p_lab_referral));
    f.push_back(number_field("p_lab_point_of_care", &C::p_lab_point_of_care));
    f.push_back(number_field("p_followup_two_visits", &C::p_followup_two_visits));
    f.push_back(number_field("p_followup_three_visits", &C::p_followup_three_visits));
    f.push_back({"followup_mode", false,
                 [](C& c, const json& v, const std::string& p) {
                   if (v == "chained") c.followup_mode = FollowupMode::chained;
                   else if (v == "exclusive") c.followup_mode = FollowupMode::exclusive;
                   else throw ConfigError(p, "expected \"chained\" or \"exclusive\"");
                 },
                 [](const C& c) {
                   return json(c.followup_mode == FollowupMode::chained ? "chained" : "exclusive");
                 }});
    f.push_back(int_field("followup_gap_min_days", &C::followup_gap_min_days));
    f.push_back(int_field("followup_gap_max_days", &C::followup_gap_max_days));
    f.push_back(distribution_field("doctor_admin_total", &C::doctor_admin_total));
    f.push_back(distribution_field("ncd_admin_total", &C::ncd_admin_total));
    f.push_back(number_field("nurse_admin_per_shift", &C::nurse_admin_per_shift));
    f.push_back(number_field("referral_threshold", &C::referral_threshold));
    f.push_back({"opd_open_minute", false,
                 [](C& c, const json& v, const std::string& p) { c.opd_window.open_minute = as_number(v, p); },
                 [](const C& c) { return json(c.opd_window.open_minute); }});
    f.push_back({"opd_close_minute", false,
                 [](C& c, const json& v, const std::string& p) { c.opd_window.close_minute = as_number(v, p); },
                 [](const C& c) { return json(c.opd_window.close_minute); }});
    f.push_back(int_field("anc_visits", &C::anc_visits, true));
    f.push_back(int_field("anc_gap_min_days", &C::anc_gap_min_days, true));
    f.push_back(int_field("anc_gap_max_days", &C::anc_gap_max_days, true));
    f.push_back({"childbirth_order", true,
                 [](C& c, const json& v, const std::string& p) {
                   if (v == "care_then_bed") c.childbirth_order = ChildbirthOrder::care_then_bed;
                   else if (v == "bed_then_care") c.childbirth_order = ChildbirthOrder::bed_then_care;
                   else throw ConfigError(p, "expected \"care_then_bed\" or \"bed_then_care\"");
                 },
                 [](const C& c) {
                   return json(c.childbirth_order == ChildbirthOrder::care_then_bed ? "care_then_bed"
                                                                                    : "bed_then_care");
                 }});
    f.push_back(bool_field("inpatient_referral_when_full", &C::inpatient_referral_when_full));
    f.push_back(bool_field("lab_report_next_day", &C::lab_report_next_day));
    f.push_back(bool_field("include_followups", &C::include_followups));
    f.push_back(bool_field("include_admin", &C::include_admin));
    f.push_back({"validation_mode", false,
                 [](C& c, const json& v, const std::string& p) {
                   const bool on = as_bool(v, p);
                   c.include_followups = !on;
                   c.include_admin = !on;
                 },
                 [](const C& c) { return json(!c.include_followups && !c.include_admin); }});
    return f;
  }();
  return table;
}

const Field* find_field(std::string_view name) {
  for (const auto& f : fields()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

PhcConfiguration defaults(int id) {
  PhcConfiguration c;
  c.config_id = id;
  switch (id) {
    case 1:
      break;
    case 2:
      c.opd_interarrival_mean = 9.0;
      c.childbirth_interarrival_mean = 2880.0;
      c.anc_interarrival_mean = 2880.0;
      c.n_doctors = 1;
      break;
    case 3:
      c.opd_interarrival_mean = 9.0;
      c.childbirth_interarrival_mean.reset();
      c.anc_interarrival_mean.reset();
      c.n_doctors = 1;
      break;
    case 4:
      c.opd_interarrival_mean = 3.0;
      c.doctor_opd_consult = sim::Normal{5.0, 1.0, 2.0};
      break;
    default:
      throw ConfigError("config_id", "must be 1, 2, 3 or 4");
  }
  return c;
}

}  // namespace

DistributionSpec consult_with_mean(double mean) {
  constexpr double m0 = 0.87, sd0 = 0.21, lb0 = 0.5;
  constexpr double m1 = 5.0, sd1 = 1.0, lb1 = 2.0;
  const double w = (mean - m0) / (m1 - m0);
  const double sd = std::max(0.05, sd0 + w * (sd1 - sd0));
  const double lb = std::clamp(lb0 + w * (lb1 - lb0), 0.0, mean);
  return sim::Normal{mean, sd, lb};
}

void InterventionFlags::validate() const {
  if (childbirth_mix) {
    for (double p : {mix.p_none, mix.p_one_third, mix.p_full}) check_probability(p, "interventions.childbirth_mix");
    if (std::abs(mix.p_none + mix.p_one_third + mix.p_full - 1.0) > 1e-9) {
      throw ConfigError("interventions.childbirth_mix", "probabilities must sum to 1");
    }
  }
  if (extra_labour_beds < 0) throw ConfigError("interventions.extra_labour_beds", "must be nonnegative");
  if (inpatient_bed_count_override && *inpatient_bed_count_override < 0) {
    throw ConfigError("interventions.inpatient_bed_count", "must be nonnegative");
  }
  check_probability(nurse_assists_ncd_fraction, "interventions.nurse_assists_ncd");
}

bool InterventionFlags::any() const {
  return nurse_takes_doctor_admin || childbirth_mix || extra_doctor || extra_labour_beds > 0 ||
         inpatient_bed_count_override.has_value() || nurse_takes_ncd_admin || nurse_assists_ncd_fraction > 0.0;
}

void PhcConfiguration::validate() const {
  if (config_id < 1 || config_id > 4) throw ConfigError("config_id", "must be 1, 2, 3 or 4");
  if (opd_interarrival_mean) check_positive(*opd_interarrival_mean, "opd_iat");
  if (ipd_interarrival_mean) check_positive(*ipd_interarrival_mean, "ipd_iat");
  if (childbirth_interarrival_mean) check_positive(*childbirth_interarrival_mean, "childbirth_iat");
  if (anc_interarrival_mean) check_positive(*anc_interarrival_mean, "anc_iat");
  if (n_doctors < 1) throw ConfigError("n_doctors", "at least one doctor is required");
  if (n_staff_nurses < 3) throw ConfigError("n_staff_nurses", "three shifts need at least three staff nurses");
  if (n_inpatient_beds < 0) throw ConfigError("n_inpatient_beds", "must be nonnegative");
  if (n_labour_beds < 0) throw ConfigError("n_labour_beds", "must be nonnegative");
  if (ipd_interarrival_mean && n_inpatient_beds < 1) {
    throw ConfigError("n_inpatient_beds", "inpatients need at least one bed");
  }
  if (childbirth_enabled()) {
    if (n_labour_beds < 1) throw ConfigError("n_labour_beds", "childbirth needs at least one labour bed");
    if (n_inpatient_beds < 1) throw ConfigError("n_inpatient_beds", "childbirth needs a post-delivery bed");
  }

  const std::pair<const char*, const DistributionSpec*> dists[] = {
      {"doctor_opd_consult", &doctor_opd_consult},   {"pharmacy_service", &pharmacy_service},
      {"lab_service", &lab_service},                 {"ncd_check", &ncd_check},
      {"doctor_inpatient", &doctor_inpatient},       {"nurse_inpatient", &nurse_inpatient},
      {"nurse_childbirth", &nurse_childbirth},       {"doctor_childbirth", &doctor_childbirth},
      {"inpatient_bed_stay", &inpatient_bed_stay},   {"labour_bed_stay", &labour_bed_stay},
      {"postdelivery_bed_stay", &postdelivery_bed_stay}, {"anc_nurse", &anc_nurse},
      {"lab_report_delay", &lab_report_delay},       {"doctor_admin_total", &doctor_admin_total},
      {"ncd_admin_total", &ncd_admin_total},
  };
  for (const auto& [name, d] : dists) check_distribution(*d, name);

  check_probability(p_age_30_plus, "p_age_30_plus");
  check_probability(p_lab_referral, "p_lab_referral");
  check_probability(p_lab_point_of_care, "p_lab_point_of_care");
  check_probability(p_followup_two_visits, "p_followup_two_visits");
  check_probability(p_followup_three_visits, "p_followup_three_visits");
  if (p_followup_two_visits + p_followup_three_visits > 1.0 + 1e-12) {
    throw ConfigError("p_followup_three_visits", "p_followup_two_visits + p_followup_three_visits must be <= 1");
  }
  if (followup_gap_min_days < 1 || followup_gap_max_days < followup_gap_min_days) {
    throw ConfigError("followup_gap_min_days", "need 1 <= min <= max");
  }
  if (!(nurse_admin_per_shift >= 0.0)) throw ConfigError("nurse_admin_per_shift", "must be nonnegative");
  if (!(referral_threshold >= 0.0)) throw ConfigError("referral_threshold", "must be nonnegative");
  try {
    opd_window.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("opd_open_minute", e.what());
  }
  if (anc_visits < 1 || anc_visits > 4) throw ConfigError("anc_visits", "must be between 1 and 4");
  if (anc_gap_min_days < 1 || anc_gap_max_days < anc_gap_min_days) {
    throw ConfigError("anc_gap_min_days", "need 1 <= min <= max");
  }
  interventions.validate();
}

PhcConfiguration build_configuration(int config_id, const nlohmann::json& overrides, const std::string& path) {
  PhcConfiguration c = defaults(config_id);
  if (!overrides.is_null()) {
    if (!overrides.is_object()) throw ConfigError(path, "expected an object of field overrides");
    for (const auto& [key, value] : overrides.items()) set_field(c, key, value, join(path, key));
  }
  c.validate();
  return c;
}

void set_field(PhcConfiguration& config, std::string_view name, const nlohmann::json& value,
               const std::string& path) {
  const Field* f = find_field(name);
  if (!f) throw ConfigError(path, "unknown configuration field '" + std::string(name) + "'");
  if (f->childbirth_only && config.config_id == 3) {
    throw ConfigError(path, "configuration 3 offers no childbirth or ANC services");
  }
  f->set(config, value, path);
}

bool is_field(std::string_view name) { return find_field(name) != nullptr; }

std::vector<std::string> field_names() {
  std::vector<std::string> names;
  for (const auto& f : fields()) names.push_back(f.name);
  return names;
}

nlohmann::json get_field(const PhcConfiguration& config, std::string_view name) {
  const Field* f = find_field(name);
  if (!f) throw ConfigError(std::string(name), "unknown configuration field");
  return f->get(config);
}

nlohmann::json to_json(const PhcConfiguration& config) {
  json j = json::object();
  j["config_id"] = config.config_id;
  for (const auto& f : fields()) {
    if (f.name == "ipd_per_day" || f.name == "childbirth_per_day" || f.name == "anc_per_day" ||
        f.name == "consult_mean" || f.name == "validation_mode" || f.name == "opd_first_visits_per_day") {
      continue;  // derived views of other fields
    }
    j[f.name] = f.get(config);
  }
  j["interventions"] = to_json(config.interventions);
  return j;
}

PhcConfiguration apply_interventions(PhcConfiguration config, const InterventionFlags& flags) {
  flags.validate();
  if (flags.extra_doctor) config.n_doctors += 1;
  if (flags.inpatient_bed_count_override) config.n_inpatient_beds = *flags.inpatient_bed_count_override;
  if (flags.extra_labour_beds > 0) {
    if (!config.childbirth_enabled()) {
      throw ConfigError("interventions.extra_labour_beds", "configuration has no childbirth service");
    }
    if (flags.extra_labour_beds >= config.n_inpatient_beds) {
      throw ConfigError("interventions.extra_labour_beds",
                        "converting that many inpatient beds leaves none for inpatients");
    }
    config.n_labour_beds += flags.extra_labour_beds;
    config.n_inpatient_beds -= flags.extra_labour_beds;
  }
  if (flags.childbirth_mix && !config.childbirth_enabled()) {
    throw ConfigError("interventions.childbirth_mix", "configuration has no childbirth service");
  }
  config.interventions = flags;
  config.validate();
  return config;
}

InterventionFlags parse_interventions(const nlohmann::json& j, const std::string& path) {
  InterventionFlags f;
  if (j.is_null()) return f;
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string p = join(path, key);
    if (key == "nurse_takes_doctor_admin") {
      f.nurse_takes_doctor_admin = as_bool(v, p);
    } else if (key == "childbirth_mix") {
      if (v.is_boolean()) {
        f.childbirth_mix = v.get<bool>();
      } else if (v.is_array() && v.size() == 3) {
        f.childbirth_mix = true;
        f.mix = {as_number(v[0], p + "[0]"), as_number(v[1], p + "[1]"), as_number(v[2], p + "[2]")};
      } else {
        throw ConfigError(p, "expected true/false or [p_none, p_one_third, p_full]");
      }
    } else if (key == "extra_doctor") {
      f.extra_doctor = as_bool(v, p);
    } else if (key == "extra_labour_beds") {
      f.extra_labour_beds = as_int(v, p);
    } else if (key == "inpatient_bed_count") {
      f.inpatient_bed_count_override = as_int(v, p);
    } else if (key == "nurse_takes_ncd_admin") {
      f.nurse_takes_ncd_admin = as_bool(v, p);
    } else if (key == "nurse_assists_ncd") {
      if (v.is_boolean()) f.nurse_assists_ncd_fraction = v.get<bool>() ? 0.10 : 0.0;
      else f.nurse_assists_ncd_fraction = as_number(v, p);
    } else {
      throw ConfigError(p, "unknown intervention");
    }
  }
  f.validate();
  return f;
}

nlohmann::json to_json(const InterventionFlags& f) {
  json j = json::object();
  j["nurse_takes_doctor_admin"] = f.nurse_takes_doctor_admin;
  j["childbirth_mix"] = f.childbirth_mix ? json::array({f.mix.p_none, f.mix.p_one_third, f.mix.p_full})
                                         : json(false);
  j["extra_doctor"] = f.extra_doctor;
  j["extra_labour_beds"] = f.extra_labour_beds;
  j["inpatient_bed_count"] =
      f.inpatient_bed_count_override ? json(*f.inpatient_bed_count_override) : json(nullptr);
  j["nurse_takes_ncd_admin"] = f.nurse_takes_ncd_admin;
  j["nurse_assists_ncd"] = f.nurse_assists_ncd_fraction;
  return j;
}

DistributionSpec parse_distribution(const nlohmann::json& j, const std::string& path) {
  if (j.is_number()) {
    DistributionSpec d = sim::Constant{j.get<double>()};
    check_distribution(d, path);
    return d;
  }
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError(path, "expected a number or an object with a \"kind\"");
  }
  const std::string kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : "";
  auto num = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing");
    return as_number(j.at(key), join(path, key));
  };
  auto allow = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : j.items()) {
      if (k == "kind") continue;
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        throw ConfigError(join(path, k), "unknown parameter for " + kind);
      }
    }
  };
  DistributionSpec d;
  if (kind == "exponential") {
    allow({"mean"});
    d = sim::Exponential{num("mean")};
  } else if (kind == "normal") {
    allow({"mean", "sd", "lower_bound"});
    d = sim::Normal{num("mean"), num("sd"), j.contains("lower_bound") ? num("lower_bound") : 0.0};
  } else if (kind == "uniform") {
    allow({"min", "max"});
    d = sim::Uniform{num("min"), num("max")};
  } else if (kind == "triangular") {
    allow({"low", "mode", "high"});
    d = sim::Triangular{num("low"), num("mode"), num("high")};
  } else if (kind == "constant") {
    allow({"value"});
    d = sim::Constant{num("value")};
  } else {
    throw ConfigError(join(path, "kind"), "unknown distribution kind '" + kind + "'");
  }
  check_distribution(d, path);
  return d;
}

nlohmann::json to_json(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, sim::Exponential>) return {{"kind", "exponential"}, {"mean", d.mean}};
        else if constexpr (std::is_same_v<T, sim::Normal>)
          return {{"kind", "normal"}, {"mean", d.mean}, {"sd", d.sd}, {"lower_bound", d.lower_bound}};
        else if constexpr (std::is_same_v<T, sim::Uniform>) return {{"kind", "uniform"}, {"min", d.min}, {"max", d.max}};
        else if constexpr (std::is_same_v<T, sim::Triangular>)
          return {{"kind", "triangular"}, {"low", d.low}, {"mode", d.mode}, {"high", d.high}};
        else return {{"kind", "constant"}, {"value", d.value}};
      },
      spec);
}

}  // namespace phc::model
