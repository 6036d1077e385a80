#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace phc::analytics {

/// One job class at a shared pool of `servers` identical servers.
struct JobClass {
  double arrival_rate = 0.0;  // per minute
  double service_mean = 1.0;  // minutes
  std::optional<double> service_variance;
  int servers = 1;

  void validate() const;
};

/// A non-dominant class folded into the dominant one as a setup that arrives
/// once every `jobs_per_setup` dominant jobs.
struct Setup {
  double service_mean = 0.0;
  double jobs_per_setup = 1.0;
  double service_variance = 0.0;
};

/// Replication summary of a simulated utilization.
struct UtilizationSample {
  double rho_hat = 0.0;
  double s_hat = 0.0;
  std::size_t n = 0;
  double k_alpha = 1.959963984540054;

  void validate() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  /// Open-interval membership.
  [[nodiscard]] bool contains(double x) const { return x > lo && x < hi; }
};

class AnalyticsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

[[nodiscard]] double class_utilization(const JobClass& c);
[[nodiscard]] double additive_utilization(std::span<const JobClass> classes);
/// Share of class `index` in the summed utilization.
[[nodiscard]] double domination_factor(std::span<const JobClass> classes, std::size_t index);

/// d_1 > 1 - k s / rho_hat: the dominant class alone approximates the pool.
[[nodiscard]] bool dominant_class_suffices(double d_1, const UtilizationSample& sample);

/// Dominant mean plus each setup's mean spread over its N dominant jobs.
[[nodiscard]] double effective_service_time(double dominant_mean, std::span<const Setup> setups);
/// Variance of the setup-augmented process time (each job is followed by
/// setup i with probability 1/N_i).
[[nodiscard]] double effective_service_variance(double dominant_mean, double dominant_variance,
                                                std::span<const Setup> setups);

/// Non-dominant classes as setups with N_i = lambda_dominant / lambda_i, in
/// descending utilization order; classes with no arrivals are skipped.
[[nodiscard]] std::vector<Setup> setups_from(std::span<const JobClass> classes, std::size_t dominant);

[[nodiscard]] double rho_ap(const JobClass& dominant, std::span<const Setup> setups);
[[nodiscard]] double rho_ap(std::span<const JobClass> classes, std::size_t dominant = 0);

/// ((1-r) rho_1/rho_ap, min{(1+r) rho_1/rho_ap, 1}). Throws if lo > hi.
[[nodiscard]] Interval setup_interval(double rho_1, double rho_ap, double r);

enum class WaitFormula { pollaczek_khinchine, kingman };

/// Mean queueing delay of an M/G/1 queue. Kingman's two-moment form with
/// Poisson arrivals (ca^2 = 1) coincides with Pollaczek-Khinchine.
[[nodiscard]] double mg1_wait(double arrival_rate, double service_mean, double service_variance,
                              WaitFormula formula = WaitFormula::pollaczek_khinchine);
/// Allen-Cunneen M/G/c: the M/M/c delay scaled by (1 + cs^2)/2. Equals
/// Pollaczek-Khinchine at c = 1.
[[nodiscard]] double mgc_wait(double arrival_rate, double service_mean, double service_variance, int servers);
/// Probability an arrival waits in M/M/c with offered load a = lambda/mu.
[[nodiscard]] double erlang_c(int servers, double offered_load);
/// Kingman's G/G/1 approximation.
[[nodiscard]] double kingman_wait(double arrival_rate, double arrival_scv, double service_mean,
                                  double service_scv);

enum class TestScale {
  standard_error,  // (mean - mu0) / (s / sqrt(n))
  spread           // (mean - mu0) / s: is mu0 within the spread of single replications
};

struct TTest {
  double t = 0.0;
  double p = 1.0;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

/// Two-sided one-sample t test against mu0 with n-1 degrees of freedom.
[[nodiscard]] TTest one_sample_t(std::span<const double> values, double mu0,
                                 TestScale scale = TestScale::standard_error);

enum class QuantileFamily { normal, student_t };

/// Two-sided multiplier: the 1 - alpha/2 quantile.
[[nodiscard]] double k_alpha(double alpha, QuantileFamily family = QuantileFamily::normal, double dof = 0.0);

struct ApproximationReport {
  double rho_a = 0.0;
  double rho_1 = 0.0;
  double rho_ap = 0.0;
  double d_1 = 0.0;
  std::optional<bool> dominant_class_suffices;
  std::optional<Interval> setup_interval;
  std::optional<bool> setup_interval_holds;
  std::optional<TTest> rho_a_test;
  std::optional<TTest> rho_1_test;
  std::optional<TTest> rho_ap_test;
};

/// Everything at once; the sample-dependent parts are filled only when
/// replication values are supplied.
[[nodiscard]] ApproximationReport approximation_report(std::span<const JobClass> classes, std::size_t dominant,
                                                       std::span<const Setup> setups,
                                                       std::span<const double> replications = {},
                                                       double alpha = 0.05,
                                                       QuantileFamily family = QuantileFamily::normal,
                                                       TestScale scale = TestScale::spread);

}  // namespace phc::analytics
