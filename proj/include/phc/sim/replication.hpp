#pragma once

#include <algorithm>
#include <atomic>
#include <concepts>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "phc/sim/process.hpp"
#include "phc/sim/random.hpp"

namespace phc::sim {

struct RunPlan {
  double horizon_days = 365.0;
  double warmup_days = 180.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(warmup_days > 0.0 && horizon_days > warmup_days)) {
      throw std::invalid_argument("run plan needs horizon_days > warmup_days > 0");
    }
  }
};

/// A model that can be driven through warm-up and steady state.
template <class M>
concept SteadyStateModel = requires(M m, Simulation& sim) {
  m.start(sim);
  m.reset_statistics(sim);
  m.collect(sim);
};

/// Runs one replication: start, warm up, reset accumulators, run to the
/// horizon, collect. Deterministic given the model's own seeding.
template <SteadyStateModel M>
auto run(M& model, const RunPlan& plan) {
  plan.validate();
  Simulation sim;
  model.start(sim);
  sim.run_until(plan.warmup_days * minutes_per_day);
  model.reset_statistics(sim);
  sim.run_until(plan.horizon_days * minutes_per_day);
  return model.collect(sim);
}

/// Evaluates job(i) for i in [0, n) on up to `threads` workers and returns
/// the results in index order. Jobs must share nothing mutable. The first
/// exception thrown by any job is rethrown after all workers stop.
template <class Job>
auto replicate(std::size_t n, Job job, unsigned threads = 0) {
  using Result = decltype(job(std::size_t{}));
  std::vector<std::optional<Result>> slots(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(job(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Result> results;
  results.reserve(n);
  for (auto& s : slots) results.push_back(std::move(*s));
  return results;
}

}  // namespace phc::sim
