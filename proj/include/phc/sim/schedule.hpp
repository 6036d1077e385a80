#pragma once

#include "phc/sim/calendar.hpp"

namespace phc::sim {

/// A daily service window [open_minute, close_minute) within a 1440-minute
/// day. With overtime, work accepted before close is finished after it.
struct DailySchedule {
  double open_minute = 0.0;
  double close_minute = minutes_per_day;
  bool overtime = true;

  [[nodiscard]] static DailySchedule around_the_clock() { return {0.0, minutes_per_day, false}; }

  void validate() const;

  [[nodiscard]] double window_length() const noexcept { return close_minute - open_minute; }

  [[nodiscard]] bool is_open(Minutes t) const;

  /// Start of the first window opening at or after t.
  [[nodiscard]] Minutes next_open(Minutes t) const;

  /// Closing time of the window containing t (t must be inside a window).
  [[nodiscard]] Minutes close_of(Minutes t) const;

  /// Scheduled minutes of `servers` parallel servers within [from, to).
  [[nodiscard]] double scheduled_minutes(Minutes from, Minutes to, double servers = 1.0) const;

  /// Maps elapsed open time (minutes counted only while the window is open,
  /// from day 0) to the calendar time it falls on.
  [[nodiscard]] Minutes from_open_time(double open_minutes) const;
  [[nodiscard]] double to_open_time(Minutes t) const;
};

/// Busy time over scheduled time. May exceed 1 under overtime; zero
/// scheduled time is undefined and throws.
[[nodiscard]] double utilization(double busy_minutes, double scheduled_minutes);

}  // namespace phc::sim
