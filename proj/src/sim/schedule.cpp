#include "phc/sim/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace phc::sim {

void DailySchedule::validate() const {
  if (!(open_minute >= 0.0 && close_minute <= minutes_per_day && open_minute < close_minute)) {
    throw std::invalid_argument("daily schedule needs 0 <= open < close <= 1440");
  }
}

bool DailySchedule::is_open(Minutes t) const {
  const double m = std::fmod(t, minutes_per_day);
  return m >= open_minute && m < close_minute;
}

Minutes DailySchedule::next_open(Minutes t) const {
  const double day = std::floor(t / minutes_per_day);
  const double m = t - day * minutes_per_day;
  if (m < open_minute) return day * minutes_per_day + open_minute;
  if (m < close_minute) return t;
  return (day + 1.0) * minutes_per_day + open_minute;
}

Minutes DailySchedule::close_of(Minutes t) const {
  return std::floor(t / minutes_per_day) * minutes_per_day + close_minute;
}

double DailySchedule::scheduled_minutes(Minutes from, Minutes to, double servers) const {
  if (to <= from) return 0.0;
  // Open minutes in [0, x).
  auto cumulative = [this](Minutes x) {
    const double day = std::floor(x / minutes_per_day);
    const double m = x - day * minutes_per_day;
    double partial = 0.0;
    if (m > open_minute) partial = std::min(m, close_minute) - open_minute;
    return day * window_length() + partial;
  };
  return servers * (cumulative(to) - cumulative(from));
}

Minutes DailySchedule::from_open_time(double open_minutes) const {
  const double len = window_length();
  const double day = std::floor(open_minutes / len);
  return day * minutes_per_day + open_minute + (open_minutes - day * len);
}

double DailySchedule::to_open_time(Minutes t) const { return scheduled_minutes(0.0, t); }

double utilization(double busy_minutes, double scheduled_minutes) {
  if (!(scheduled_minutes > 0.0)) {
    throw std::domain_error("utilization undefined: no scheduled time");
  }
  return busy_minutes / scheduled_minutes;
}

}  // namespace phc::sim
