#pragma once

#include <vector>

#include "phc/analytics/queueing.hpp"
#include "phc/model/config.hpp"

namespace phc::analytics {

/// Fraction of a 24-hour class's doctor load that falls in the OPD window,
/// as used for the additive estimate.
inline constexpr double default_window_fraction = 0.353;

/// The doctor's queue without revisits or administration: outpatients
/// (dominant, OPD clock) plus inpatients and childbirth cases.
struct DoctorInstance {
  /// Outpatient, inpatient, childbirth; minor-class rates already carry the
  /// window fraction. Absent classes have rate zero.
  std::vector<JobClass> classes;
  /// Minor classes folded into the outpatient consult, one setup per
  /// 1 / (consult mean x 24-hour rate) outpatients.
  std::vector<Setup> setups;
  std::size_t dominant = 0;
};

[[nodiscard]] DoctorInstance doctor_instance(const model::PhcConfiguration& config,
                                             double window_fraction = default_window_fraction);

/// Outpatient queueing delay of the setup-augmented view: minor classes
/// become setups at their window-scaled rates (N_i = lambda_1 / lambda_i) and
/// the doctor pool is an M/G/c queue.
[[nodiscard]] double doctor_wait_estimate(const DoctorInstance& instance);

}  // namespace phc::analytics
