#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

#include "phc/sim/calendar.hpp"

namespace phc::sim {

/// Integral of a piecewise-constant signal. Exact: the value only changes at
/// update() calls.
class TimeWeighted {
 public:
  explicit TimeWeighted(Minutes start = 0.0, double value = 0.0)
      : origin_(start), last_(start), value_(value) {}

  void update(Minutes t, double value) {
    advance(t);
    value_ = value;
  }
  void add(Minutes t, double delta) { update(t, value_ + delta); }

  /// Restarts the integral at t, keeping the current level.
  void reset(Minutes t) {
    origin_ = last_ = t;
    area_ = 0.0;
  }

  [[nodiscard]] double current() const noexcept { return value_; }
  [[nodiscard]] Minutes origin() const noexcept { return origin_; }

  [[nodiscard]] double integral(Minutes t) const {
    if (t < last_) throw ContractViolation("time-weighted query precedes last update");
    return area_ + value_ * (t - last_);
  }

  /// Mean over [origin, t]; zero for an empty interval.
  [[nodiscard]] double mean(Minutes t) const {
    const double span = t - origin_;
    return span > 0.0 ? integral(t) / span : 0.0;
  }

 private:
  void advance(Minutes t) {
    if (t < last_) throw ContractViolation("time-weighted update goes back in time");
    area_ += value_ * (t - last_);
    last_ = t;
  }

  Minutes origin_;
  Minutes last_;
  double value_;
  double area_ = 0.0;
};

/// Running mean/variance of observations (Welford).
class Tally {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
    sum_ += x;
    if (x < min_) min_ = x;
    if (x > max_) max_ = x;
  }
  void reset() { *this = Tally{}; }

  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] double sum() const noexcept { return sum_; }
  [[nodiscard]] double mean() const noexcept { return n_ ? mean_ : 0.0; }
  /// Sample variance (n - 1 denominator); zero below two observations.
  [[nodiscard]] double variance() const noexcept {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  [[nodiscard]] double sd() const noexcept { return std::sqrt(variance()); }
  [[nodiscard]] double min() const noexcept { return n_ ? min_ : 0.0; }
  [[nodiscard]] double max() const noexcept { return n_ ? max_ : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double sum_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

/// Cross-replication mean and sample SD.
struct SampleSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

[[nodiscard]] inline SampleSummary summarize(std::span<const double> values) {
  Tally t;
  for (double v : values) t.add(v);
  return {t.mean(), t.sd(), t.count()};
}

}  // namespace phc::sim
