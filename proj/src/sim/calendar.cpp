#include "phc/sim/calendar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace phc::sim {

void Calendar::schedule(Minutes at, Action action) {
  if (!(at >= now_) || std::isnan(at)) {
    throw ContractViolation("event scheduled in the past: t=" + std::to_string(at) +
                            " < now=" + std::to_string(now_));
  }
  heap_.push_back(Entry{at, next_sequence_++, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), later);
}

bool Calendar::step() {
  if (heap_.empty()) return false;
  std::pop_heap(heap_.begin(), heap_.end(), later);
  Entry entry = std::move(heap_.back());
  heap_.pop_back();
  now_ = entry.time;
  ++dispatched_;
  entry.action();
  return true;
}

void Calendar::run_until(Minutes horizon) {
  if (horizon < now_) {
    throw ContractViolation("run_until target precedes the current clock");
  }
  while (!heap_.empty() && heap_.front().time <= horizon) step();
  now_ = horizon;
}

std::optional<Minutes> Calendar::next_time() const {
  if (heap_.empty()) return std::nullopt;
  return heap_.front().time;
}

}  // namespace phc::sim
