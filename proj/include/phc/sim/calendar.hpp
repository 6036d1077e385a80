#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace phc::sim {

/// Simulated time, in minutes since the start of the run.
using Minutes = double;

inline constexpr Minutes minutes_per_day = 1440.0;

/// Raised when a caller breaks a kernel precondition (e.g. scheduling in the past).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Future event list. Events fire in nondecreasing time order; events that
/// share a timestamp fire in the order they were scheduled.
class Calendar {
 public:
  using Action = std::function<void()>;

  Calendar() = default;
  Calendar(const Calendar&) = delete;
  Calendar& operator=(const Calendar&) = delete;

  void schedule(Minutes at, Action action);
  void schedule_in(Minutes delay, Action action) { schedule(now_ + delay, std::move(action)); }

  /// Dispatches the earliest event. Returns false when the calendar is empty.
  bool step();

  /// Dispatches every event with time <= horizon, then advances the clock to horizon.
  void run_until(Minutes horizon);

  [[nodiscard]] Minutes now() const noexcept { return now_; }
  [[nodiscard]] bool empty() const noexcept { return heap_.empty(); }
  [[nodiscard]] std::size_t pending() const noexcept { return heap_.size(); }
  [[nodiscard]] std::optional<Minutes> next_time() const;
  [[nodiscard]] std::uint64_t dispatched() const noexcept { return dispatched_; }

 private:
  struct Entry {
    Minutes time;
    std::uint64_t sequence;
    Action action;
  };
  static bool later(const Entry& a, const Entry& b) noexcept {
    if (a.time != b.time) return a.time > b.time;
    return a.sequence > b.sequence;
  }

  std::vector<Entry> heap_;
  Minutes now_ = 0.0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_ = 0;
};

}  // namespace phc::sim
