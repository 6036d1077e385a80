#include "phc/analytics/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace phc::analytics {

void JobClass::validate() const {
  if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate)) {
    throw std::invalid_argument("arrival rate must be finite and nonnegative");
  }
  if (!(service_mean > 0.0) || !std::isfinite(service_mean)) {
    throw std::invalid_argument("service mean must be positive");
  }
  if (service_variance && !(*service_variance >= 0.0)) {
    throw std::invalid_argument("service variance must be nonnegative");
  }
  if (servers < 1) throw std::invalid_argument("a class needs at least one server");
}

void UtilizationSample::validate() const {
  if (!(s_hat >= 0.0)) throw std::invalid_argument("sample SD must be nonnegative");
  if (n < 2) throw std::invalid_argument("a utilization sample needs at least two replications");
  if (!(k_alpha >= 0.0)) throw std::invalid_argument("k_alpha must be nonnegative");
}

double class_utilization(const JobClass& c) {
  c.validate();
  return c.arrival_rate * c.service_mean / static_cast<double>(c.servers);
}

double additive_utilization(std::span<const JobClass> classes) {
  double sum = 0.0;
  for (const auto& c : classes) sum += class_utilization(c);
  return sum;
}

double domination_factor(std::span<const JobClass> classes, std::size_t index) {
  if (index >= classes.size()) throw std::out_of_range("dominant class index out of range");
  const double total = additive_utilization(classes);
  if (!(total > 0.0)) throw AnalyticsError("domination factor undefined when every class is idle");
  return class_utilization(classes[index]) / total;
}

bool dominant_class_suffices(double d_1, const UtilizationSample& sample) {
  sample.validate();
  if (!(sample.rho_hat > 0.0)) throw AnalyticsError("simulated utilization must be positive");
  return d_1 > 1.0 - sample.k_alpha * sample.s_hat / sample.rho_hat;
}

double effective_service_time(double dominant_mean, std::span<const Setup> setups) {
  if (!(dominant_mean > 0.0)) throw std::invalid_argument("dominant service mean must be positive");
  double t = dominant_mean;
  for (const auto& s : setups) {
    if (!(s.jobs_per_setup > 0.0)) throw std::invalid_argument("jobs per setup must be positive");
    if (!(s.service_mean >= 0.0)) throw std::invalid_argument("setup mean must be nonnegative");
    t += s.service_mean / s.jobs_per_setup;
  }
  return t;
}

double effective_service_variance(double dominant_mean, double dominant_variance, std::span<const Setup> setups) {
  (void)effective_service_time(dominant_mean, setups);
  if (!(dominant_variance >= 0.0)) throw std::invalid_argument("dominant variance must be nonnegative");
  // Each job carries setup i with probability q = 1/N_i independently:
  // Var = sigma0^2 + sum q (sigma_i^2 + t_i^2) - (q t_i)^2.
  double v = dominant_variance;
  for (const auto& s : setups) {
    if (!(s.service_variance >= 0.0)) throw std::invalid_argument("setup variance must be nonnegative");
    const double q = std::min(1.0, 1.0 / s.jobs_per_setup);
    v += q * (s.service_variance + s.service_mean * s.service_mean) - q * q * s.service_mean * s.service_mean;
  }
  return v;
}

std::vector<Setup> setups_from(std::span<const JobClass> classes, std::size_t dominant) {
  if (dominant >= classes.size()) throw std::out_of_range("dominant class index out of range");
  const auto& d = classes[dominant];
  d.validate();
  if (!(d.arrival_rate > 0.0)) throw AnalyticsError("the dominant class has no arrivals");
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (i != dominant && class_utilization(classes[i]) > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return class_utilization(classes[a]) > class_utilization(classes[b]);
  });
  std::vector<Setup> out;
  for (auto i : order) {
    const auto& c = classes[i];
    out.push_back({c.service_mean, d.arrival_rate / c.arrival_rate, c.service_variance.value_or(0.0)});
  }
  return out;
}

double rho_ap(const JobClass& dominant, std::span<const Setup> setups) {
  dominant.validate();
  return dominant.arrival_rate * effective_service_time(dominant.service_mean, setups) /
         static_cast<double>(dominant.servers);
}

double rho_ap(std::span<const JobClass> classes, std::size_t dominant) {
  const auto setups = setups_from(classes, dominant);
  return rho_ap(classes[dominant], setups);
}

Interval setup_interval(double rho_1, double rho_ap_value, double r) {
  if (!(rho_ap_value > 0.0)) throw std::invalid_argument("rho_ap must be positive");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be nonnegative");
  const double ratio = rho_1 / rho_ap_value;
  Interval iv{(1.0 - r) * ratio, std::min((1.0 + r) * ratio, 1.0)};
  if (iv.lo > iv.hi) throw AnalyticsError("empty interval: (1-r) rho_1 / rho_ap exceeds 1");
  return iv;
}

double mg1_wait(double arrival_rate, double service_mean, double service_variance, WaitFormula formula) {
  if (!(arrival_rate >= 0.0) || !(service_mean > 0.0) || !(service_variance >= 0.0)) {
    throw std::invalid_argument("M/G/1 needs rate >= 0, mean > 0, variance >= 0");
  }
  const double rho = arrival_rate * service_mean;
  if (rho >= 1.0) throw AnalyticsError("M/G/1 with rho >= 1 has no steady state");
  if (formula == WaitFormula::kingman) {
    return kingman_wait(arrival_rate, 1.0, service_mean, service_variance / (service_mean * service_mean));
  }
  return arrival_rate * (service_variance + service_mean * service_mean) / (2.0 * (1.0 - rho));
}

double kingman_wait(double arrival_rate, double arrival_scv, double service_mean, double service_scv) {
  if (!(arrival_rate >= 0.0) || !(service_mean > 0.0) || !(arrival_scv >= 0.0) || !(service_scv >= 0.0)) {
    throw std::invalid_argument("Kingman needs rate >= 0, mean > 0, nonnegative SCVs");
  }
  const double rho = arrival_rate * service_mean;
  if (rho >= 1.0) throw AnalyticsError("G/G/1 with rho >= 1 has no steady state");
  return (arrival_scv + service_scv) / 2.0 * rho / (1.0 - rho) * service_mean;
}

double erlang_c(int servers, double offered_load) {
  if (servers < 1) throw std::invalid_argument("need at least one server");
  if (!(offered_load >= 0.0)) throw std::invalid_argument("offered load must be nonnegative");
  const double c = static_cast<double>(servers);
  if (offered_load >= c) throw AnalyticsError("M/M/c with a >= c has no steady state");
  double term = 1.0, sum = 1.0;  // a^k / k!
  for (int k = 1; k < servers; ++k) {
    term *= offered_load / static_cast<double>(k);
    sum += term;
  }
  const double tail = term * offered_load / c / (1.0 - offered_load / c);
  return tail / (sum + tail);
}

double mgc_wait(double arrival_rate, double service_mean, double service_variance, int servers) {
  if (!(arrival_rate >= 0.0) || !(service_mean > 0.0) || !(service_variance >= 0.0)) {
    throw std::invalid_argument("M/G/c needs rate >= 0, mean > 0, variance >= 0");
  }
  const double a = arrival_rate * service_mean;
  const double c = static_cast<double>(servers);
  const double mmc = erlang_c(servers, a) * service_mean / (c - a);
  return (1.0 + service_variance / (service_mean * service_mean)) / 2.0 * mmc;
}

TTest one_sample_t(std::span<const double> values, double mu0, TestScale scale) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("a t test needs at least two observations");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw AnalyticsError("a t test needs a sample with positive variance");
  const double se = scale == TestScale::spread ? sd : sd / std::sqrt(static_cast<double>(n));
  const double t = (mean - mu0) / se;
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double p = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
  return {t, p, mean, sd, n};
}

double k_alpha(double alpha, QuantileFamily family, double dof) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (family == QuantileFamily::student_t) {
    if (!(dof > 0.0)) throw std::invalid_argument("Student t quantile needs positive degrees of freedom");
    return boost::math::quantile(boost::math::students_t(dof), 1.0 - alpha / 2.0);
  }
  return boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2.0);
}

ApproximationReport approximation_report(std::span<const JobClass> classes, std::size_t dominant,
                                         std::span<const Setup> setups, std::span<const double> replications,
                                         double alpha, QuantileFamily family, TestScale scale) {
  if (dominant >= classes.size()) throw std::out_of_range("dominant class index out of range");
  ApproximationReport r;
  r.rho_a = additive_utilization(classes);
  r.rho_1 = class_utilization(classes[dominant]);
  r.rho_ap = rho_ap(classes[dominant], setups);
  r.d_1 = domination_factor(classes, dominant);
  if (replications.empty()) return r;

  const auto vs_a = one_sample_t(replications, r.rho_a, scale);
  UtilizationSample sample{vs_a.mean, vs_a.sd, vs_a.n,
                           k_alpha(alpha, family, static_cast<double>(replications.size() - 1))};
  r.rho_a_test = vs_a;
  r.rho_1_test = one_sample_t(replications, r.rho_1, scale);
  r.rho_ap_test = one_sample_t(replications, r.rho_ap, scale);
  r.dominant_class_suffices = dominant_class_suffices(r.d_1, sample);
  const double ratio = sample.k_alpha * sample.s_hat / sample.rho_hat;
  try {
    r.setup_interval = setup_interval(r.rho_1, r.rho_ap, ratio);
    r.setup_interval_holds = r.setup_interval->contains(r.d_1);
  } catch (const AnalyticsError&) {
    r.setup_interval_holds = false;
  }
  return r;
}

}  // namespace phc::analytics
