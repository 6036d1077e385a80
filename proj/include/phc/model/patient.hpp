#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phc/sim/calendar.hpp"

namespace phc::model {

enum class PatientClass : int { outpatient = 0, inpatient = 1, childbirth = 2, anc = 3 };
enum class Disposition { completed, referred_out };

[[nodiscard]] std::string_view class_name(PatientClass c);

/// One timestamped transition of one patient.
struct TraceRecord {
  sim::Minutes time;
  std::uint64_t patient;
  PatientClass patient_class;
  std::string_view resource;
  std::string_view event;
};

/// An entity's identity and trail through the facility. Outpatients carry
/// visit_index 1..3 and ANC patients 1..4.
struct PatientRecord {
  std::uint64_t id = 0;
  PatientClass patient_class = PatientClass::outpatient;
  bool age_30_plus = false;
  int visit_index = 1;
  sim::Minutes arrival_time = 0.0;
  std::optional<Disposition> disposition;
};

}  // namespace phc::model
