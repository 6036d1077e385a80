#include "phc/sim/process.hpp"

#include <vector>

namespace phc::sim {

Simulation::~Simulation() {
  // Frames may be parked on the calendar or in resource queues; neither is
  // dispatched again, so destroying them here is safe.
  std::vector<void*> frames(live_.begin(), live_.end());
  live_.clear();
  for (void* frame : frames) std::coroutine_handle<>::from_address(frame).destroy();
}

void Simulation::spawn(Process process) {
  auto h = process.release();
  if (!h) throw ContractViolation("spawn() given an empty process");
  h.promise().owner = this;
  live_.insert(h.address());
  schedule(now(), [h] { h.resume(); });
}

}  // namespace phc::sim
