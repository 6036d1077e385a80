#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "phc/model/patient.hpp"
#include "phc/sim/statistics.hpp"

namespace phc::model {

/// Outcomes of one steady-state replication. The first fourteen are the
/// operational outcome table rows; the rest support validation and audits.
enum class Metric : int {
  doctor_utilization,
  ncd_nurse_utilization,
  staff_nurse_utilization,
  pharmacist_utilization,
  lab_utilization,
  inpatient_bed_utilization,
  labour_bed_utilization,
  opd_queue_length,
  opd_wait,
  pharmacy_queue_length,
  pharmacy_wait,
  lab_queue_length,
  lab_wait,
  referral_fraction,
  doctor_patient_utilization,  // excludes administration
  outpatient_visits_per_day,
  childbirth_cases_per_day,
  count
};

inline constexpr int metric_count = static_cast<int>(Metric::count);
inline constexpr int table_metric_count = static_cast<int>(Metric::referral_fraction) + 1;

[[nodiscard]] std::string_view metric_name(Metric m);
[[nodiscard]] std::string_view metric_label(Metric m);
[[nodiscard]] Metric metric_from_name(std::string_view name);

/// Counters kept from time zero (not reset at warm-up) for invariant checks.
struct FlowAudit {
  std::array<std::uint64_t, 4> arrivals{};
  std::array<std::uint64_t, 4> completed{};
  std::array<std::uint64_t, 4> referred{};
  std::array<std::uint64_t, 4> in_system{};
  std::array<std::uint64_t, 4> pharmacy_visits{};
  std::array<std::uint64_t, 4> bed_stays{};
  double max_admitted_labour_wait = 0.0;
  double min_referred_labour_wait = std::numeric_limits<double>::infinity();
  /// Outpatient-unit services started for patients who arrived after close.
  std::uint64_t after_close_starts = 0;
  int max_outpatient_visit_index = 0;
  int max_anc_visit_index = 0;
  /// Sum of sampled service minutes per resource over steady state.
  double doctor_service_minutes = 0.0;
  double doctor_admin_added = 0.0;
};

struct ReplicationOutcome {
  std::array<double, metric_count> values{};
  FlowAudit audit;

  [[nodiscard]] double operator[](Metric m) const { return values[static_cast<int>(m)]; }
  double& operator[](Metric m) { return values[static_cast<int>(m)]; }
};

/// Cross-replication summary in the operational outcome table's format.
struct OutcomeReport {
  std::vector<ReplicationOutcome> replications;
  std::array<sim::SampleSummary, metric_count> summary{};
  bool childbirth_applicable = true;

  [[nodiscard]] const sim::SampleSummary& operator[](Metric m) const {
    return summary[static_cast<int>(m)];
  }
  [[nodiscard]] std::vector<double> values(Metric m) const;
  /// Labour-bed and referral outcomes do not apply without childbirth.
  [[nodiscard]] bool applicable(Metric m) const;
};

OutcomeReport aggregate(std::vector<ReplicationOutcome> reps, bool childbirth_applicable);

}  // namespace phc::model
