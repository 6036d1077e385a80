#include "phc/model/outcome.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phc::model {

namespace {

struct MetricInfo {
  std::string_view name;
  std::string_view label;
};

constexpr std::array<MetricInfo, metric_count> metric_info{{
    {"doctor_utilization", "Doctor utilization"},
    {"ncd_nurse_utilization", "NCD nurse utilization"},
    {"staff_nurse_utilization", "Staff nurse utilization"},
    {"pharmacist_utilization", "Pharmacist utilization"},
    {"lab_utilization", "Lab technician utilization"},
    {"inpatient_bed_utilization", "Inpatient bed utilization"},
    {"labour_bed_utilization", "Labour bed utilization"},
    {"opd_queue_length", "OPD queue length"},
    {"opd_wait", "OPD waiting time (min)"},
    {"pharmacy_queue_length", "Pharmacy queue length"},
    {"pharmacy_wait", "Pharmacy waiting time (min)"},
    {"lab_queue_length", "Lab queue length"},
    {"lab_wait", "Lab waiting time (min)"},
    {"referral_fraction", "Childbirth referral fraction"},
    {"doctor_patient_utilization", "Doctor utilization excluding administration"},
    {"outpatient_visits_per_day", "Outpatient visits per day"},
    {"childbirth_cases_per_day", "Childbirth cases per day"},
}};

}  // namespace

std::string_view class_name(PatientClass c) {
  switch (c) {
    case PatientClass::outpatient: return "outpatient";
    case PatientClass::inpatient: return "inpatient";
    case PatientClass::childbirth: return "childbirth";
    case PatientClass::anc: return "anc";
  }
  return "unknown";
}

std::string_view metric_name(Metric m) { return metric_info.at(static_cast<std::size_t>(m)).name; }
std::string_view metric_label(Metric m) { return metric_info.at(static_cast<std::size_t>(m)).label; }

Metric metric_from_name(std::string_view name) {
  for (int i = 0; i < metric_count; ++i) {
    if (metric_info[static_cast<std::size_t>(i)].name == name) return static_cast<Metric>(i);
  }
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

std::vector<double> OutcomeReport::values(Metric m) const {
  std::vector<double> out;
  out.reserve(replications.size());
  for (const auto& r : replications) out.push_back(r[m]);
  return out;
}

bool OutcomeReport::applicable(Metric m) const {
  if (m == Metric::labour_bed_utilization || m == Metric::referral_fraction) return childbirth_applicable;
  return true;
}

OutcomeReport aggregate(std::vector<ReplicationOutcome> reps, bool childbirth_applicable) {
  OutcomeReport report;
  report.replications = std::move(reps);
  report.childbirth_applicable = childbirth_applicable;
  for (int i = 0; i < metric_count; ++i) {
    const auto m = static_cast<Metric>(i);
    if (!report.applicable(m)) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      report.summary[static_cast<std::size_t>(i)] = {nan, nan, report.replications.size()};
      continue;
    }
    const auto v = report.values(m);
    report.summary[static_cast<std::size_t>(i)] = sim::summarize(v);
  }
  return report;
}

}  // namespace phc::model
