#include "phc/analytics/phc_adapter.hpp"

#include "phc/sim/calendar.hpp"
#include "phc/sim/distribution.hpp"

namespace phc::analytics {

DoctorInstance doctor_instance(const model::PhcConfiguration& config, double window_fraction) {
  if (!(window_fraction >= 0.0 && window_fraction <= 1.0)) {
    throw std::invalid_argument("window fraction must lie in [0, 1]");
  }
  if (!config.opd_enabled()) throw AnalyticsError("the doctor's dominant class needs outpatient arrivals");
  const int c = config.n_doctors;
  const double consult = sim::nominal_mean(config.doctor_opd_consult);
  const double consult_var = sim::variance(config.doctor_opd_consult);

  double childbirth_scale = 1.0;
  if (config.interventions.childbirth_mix) {
    childbirth_scale = config.interventions.mix.p_one_third / 3.0 + config.interventions.mix.p_full;
  }
  auto rate = [](const std::optional<double>& iat) { return iat ? 1.0 / *iat : 0.0; };
  const double ipd_rate = rate(config.ipd_interarrival_mean);
  const double cb_rate = rate(config.childbirth_interarrival_mean);
  const double ipd_mean = sim::nominal_mean(config.doctor_inpatient);
  const double cb_mean = sim::nominal_mean(config.doctor_childbirth) * childbirth_scale;

  DoctorInstance out;
  out.classes = {
      {1.0 / *config.opd_interarrival_mean, consult, consult_var, c},
      {window_fraction * ipd_rate, ipd_mean, sim::variance(config.doctor_inpatient), c},
      {window_fraction * cb_rate, cb_mean, sim::variance(config.doctor_childbirth) * childbirth_scale * childbirth_scale,
       c},
  };
  auto add_setup = [&](double r, double mean, double var) {
    if (r > 0.0 && mean > 0.0) out.setups.push_back({mean, 1.0 / (consult * r), var});
  };
  add_setup(cb_rate, cb_mean, out.classes[2].service_variance.value_or(0.0));
  add_setup(ipd_rate, ipd_mean, out.classes[1].service_variance.value_or(0.0));
  return out;
}

double doctor_wait_estimate(const DoctorInstance& instance) {
  const auto& d = instance.classes.at(instance.dominant);
  const auto setups = setups_from(instance.classes, instance.dominant);
  const double mean = effective_service_time(d.service_mean, setups);
  const double var = effective_service_variance(d.service_mean, d.service_variance.value_or(0.0), setups);
  return mgc_wait(d.arrival_rate, mean, var, d.servers);
}

}  // namespace phc::analytics
