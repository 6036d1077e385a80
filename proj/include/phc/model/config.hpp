#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "phc/sim/distribution.hpp"
#include "phc/sim/schedule.hpp"

namespace phc::model {

using sim::DistributionSpec;

/// How follow-up shares are read.
///   chained:   P(2nd visit) = p_two, P(3rd | 2nd) = p_three  (1.22 visits/case)
///   exclusive: P(2 visits) = p_two, P(3 visits) = p_three    (1.40 visits/case)
enum class FollowupMode { chained, exclusive };

/// Order of care for a childbirth case.
///   care_then_bed: staff nurse (and doctor, in hours) on arrival, then the
///                  labour bed with the referral patience.
///   bed_then_care: labour bed requested on arrival; care starts at admission.
enum class ChildbirthOrder { care_then_bed, bed_then_care };

struct ChildbirthMix {
  double p_none = 0.5;
  double p_one_third = 0.3;
  double p_full = 0.2;
};

struct InterventionFlags {
  bool nurse_takes_doctor_admin = false;
  bool childbirth_mix = false;
  ChildbirthMix mix;
  bool extra_doctor = false;
  int extra_labour_beds = 0;
  std::optional<int> inpatient_bed_count_override;
  bool nurse_takes_ncd_admin = false;
  /// Share of NCD checks done by the staff nurse; 0 disables.
  double nurse_assists_ncd_fraction = 0.0;

  void validate() const;
  [[nodiscard]] bool any() const;
};

struct PhcConfiguration {
  int config_id = 1;

  // Interarrival means, minutes. Outpatient gaps run on OPD-window time;
  // the others on the 24-hour clock. Absent = class disabled.
  std::optional<double> opd_interarrival_mean = 4.0;
  std::optional<double> ipd_interarrival_mean = 2880.0;
  std::optional<double> childbirth_interarrival_mean = 1440.0;
  std::optional<double> anc_interarrival_mean = 1440.0;

  int n_doctors = 2;
  int n_staff_nurses = 4;
  int n_inpatient_beds = 6;
  int n_labour_beds = 1;

  DistributionSpec doctor_opd_consult = sim::Normal{0.87, 0.21, 0.5};
  DistributionSpec pharmacy_service = sim::Normal{2.08, 0.72, 0.667};
  DistributionSpec lab_service = sim::Normal{3.45, 0.82, 2.0};
  DistributionSpec ncd_check = sim::Uniform{2.0, 5.0};
  DistributionSpec doctor_inpatient = sim::Uniform{10.0, 30.0};
  DistributionSpec nurse_inpatient = sim::Uniform{30.0, 60.0};
  DistributionSpec nurse_childbirth = sim::Uniform{120.0, 240.0};
  DistributionSpec doctor_childbirth = sim::Uniform{30.0, 60.0};
  DistributionSpec inpatient_bed_stay = sim::Triangular{60.0, 180.0, 360.0};
  DistributionSpec labour_bed_stay = sim::Uniform{300.0, 600.0};
  DistributionSpec postdelivery_bed_stay = sim::Uniform{240.0, 1440.0};
  DistributionSpec anc_nurse = sim::Uniform{15.0, 45.0};
  DistributionSpec lab_report_delay = sim::Uniform{5.0, 10.0};

  double p_age_30_plus = 0.7;
  double p_lab_referral = 0.44;
  double p_lab_point_of_care = 0.8;
  double p_followup_two_visits = 0.20;
  double p_followup_three_visits = 0.10;
  FollowupMode followup_mode = FollowupMode::chained;
  int followup_gap_min_days = 3;
  int followup_gap_max_days = 8;

  DistributionSpec doctor_admin_total = sim::Normal{100.0, 20.0, 0.0};
  DistributionSpec ncd_admin_total = sim::Normal{83.5, 20.0, 0.0};
  double nurse_admin_per_shift = 60.0;

  double referral_threshold = 120.0;
  sim::DailySchedule opd_window{480.0, 840.0, true};

  int anc_visits = 4;
  int anc_gap_min_days = 42;
  int anc_gap_max_days = 70;

  ChildbirthOrder childbirth_order = ChildbirthOrder::care_then_bed;
  bool inpatient_referral_when_full = false;
  /// Non-point-of-care lab patients return next day for the consult instead
  /// of leaving through the pharmacy.
  bool lab_report_next_day = false;

  // Analytics-validation mode turns both off.
  bool include_followups = true;
  bool include_admin = true;

  InterventionFlags interventions;

  [[nodiscard]] bool opd_enabled() const { return opd_interarrival_mean.has_value(); }
  [[nodiscard]] bool childbirth_enabled() const { return childbirth_interarrival_mean.has_value(); }
  [[nodiscard]] bool anc_enabled() const { return anc_interarrival_mean.has_value(); }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Published defaults for configuration 1-4, then `overrides` (a JSON
/// object of field name -> value) applied and validated.
PhcConfiguration build_configuration(int config_id, const nlohmann::json& overrides = nlohmann::json::object(),
                                     const std::string& path = "overrides");

/// Sets one named field. `path` prefixes error messages.
void set_field(PhcConfiguration& config, std::string_view name, const nlohmann::json& value,
               const std::string& path);
[[nodiscard]] bool is_field(std::string_view name);
[[nodiscard]] std::vector<std::string> field_names();
[[nodiscard]] nlohmann::json get_field(const PhcConfiguration& config, std::string_view name);
[[nodiscard]] nlohmann::json to_json(const PhcConfiguration& config);

/// Applies resource changes (extra doctor, bed conversion, bed override) and
/// records the remaining flags for the pathways. Rejects combinations that
/// cannot be built.
PhcConfiguration apply_interventions(PhcConfiguration config, const InterventionFlags& flags);

InterventionFlags parse_interventions(const nlohmann::json& j, const std::string& path = "interventions");
nlohmann::json to_json(const InterventionFlags& flags);

DistributionSpec parse_distribution(const nlohmann::json& j, const std::string& path);
nlohmann::json to_json(const DistributionSpec& spec);

/// Consult-time family used when only the mean is swept: the standard
/// deviation and lower bound are interpolated linearly between the observed
/// fit N(0.87, 0.21, >=0.5) and the benchmark N(5, 1, >=2).
DistributionSpec consult_with_mean(double mean);

}  // namespace phc::model
