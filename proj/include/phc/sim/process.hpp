#pragma once

#include <coroutine>
#include <exception>
#include <unordered_set>
#include <utility>

#include "phc/sim/calendar.hpp"

namespace phc::sim {

class Simulation;

/// Coroutine handle for one simulated process (a patient pathway, an arrival
/// generator, ...). A Process does nothing until it is handed to
/// Simulation::spawn; after that the simulation owns the frame.
class Process {
 public:
  struct promise_type {
    Simulation* owner = nullptr;

    Process get_return_object() noexcept {
      return Process{std::coroutine_handle<promise_type>::from_promise(*this)};
    }
    std::suspend_always initial_suspend() noexcept { return {}; }

    struct FinalAwaiter {
      bool await_ready() noexcept { return false; }
      void await_suspend(std::coroutine_handle<promise_type> h) noexcept;
      void await_resume() noexcept {}
    };
    FinalAwaiter final_suspend() noexcept { return {}; }

    void return_void() noexcept {}
    void unhandled_exception() { throw; }
  };

  Process() = default;
  Process(Process&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  Process& operator=(Process&& other) noexcept {
    if (this != &other) {
      reset();
      handle_ = std::exchange(other.handle_, {});
    }
    return *this;
  }
  Process(const Process&) = delete;
  Process& operator=(const Process&) = delete;
  ~Process() { reset(); }

 private:
  friend class Simulation;
  explicit Process(std::coroutine_handle<promise_type> h) noexcept : handle_(h) {}
  std::coroutine_handle<promise_type> release() noexcept { return std::exchange(handle_, {}); }
  void reset() noexcept {
    if (handle_) handle_.destroy();
    handle_ = {};
  }

  std::coroutine_handle<promise_type> handle_;
};

/// Event calendar plus the set of live processes. Suspended processes still
/// alive when the simulation is destroyed are torn down with it.
class Simulation : public Calendar {
 public:
  Simulation() = default;
  ~Simulation();

  /// Starts the process at the current clock (after already-scheduled events
  /// with the same timestamp).
  void spawn(Process process);

  /// Schedules a suspended coroutine to resume at the current clock.
  void resume_now(std::coroutine_handle<> h) {
    schedule(now(), [h] { h.resume(); });
  }

  [[nodiscard]] std::size_t live_processes() const noexcept { return live_.size(); }

  struct DelayAwaiter {
    Simulation& sim;
    Minutes delay;
    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<> h) {
      sim.schedule(sim.now() + delay, [h] { h.resume(); });
    }
    void await_resume() const noexcept {}
  };

  /// `co_await sim.delay(d)` suspends the calling process for d minutes.
  DelayAwaiter delay(Minutes d) {
    if (!(d >= 0.0)) throw ContractViolation("negative delay");
    return DelayAwaiter{*this, d};
  }

  /// `co_await sim.until(t)` suspends until absolute time t (>= now).
  DelayAwaiter until(Minutes t) {
    if (t < now()) throw ContractViolation("until() target is in the past");
    return DelayAwaiter{*this, t - now()};
  }

 private:
  friend struct Process::promise_type::FinalAwaiter;
  void finished(std::coroutine_handle<> h) noexcept { live_.erase(h.address()); }

  std::unordered_set<void*> live_;
};

inline void Process::promise_type::FinalAwaiter::await_suspend(
    std::coroutine_handle<promise_type> h) noexcept {
  if (Simulation* sim = h.promise().owner) sim->finished(h);
  h.destroy();
}

/// A sub-step of a process: `co_await some_task(...)` runs it to completion
/// inside the caller's process. The awaiting frame owns the task frame.
class Task {
 public:
  struct promise_type {
    std::coroutine_handle<> continuation;
    std::exception_ptr error;

    Task get_return_object() noexcept {
      return Task{std::coroutine_handle<promise_type>::from_promise(*this)};
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    struct FinalAwaiter {
      bool await_ready() noexcept { return false; }
      std::coroutine_handle<> await_suspend(std::coroutine_handle<promise_type> h) noexcept {
        return h.promise().continuation;
      }
      void await_resume() noexcept {}
    };
    FinalAwaiter final_suspend() noexcept { return {}; }
    void return_void() noexcept {}
    void unhandled_exception() noexcept { error = std::current_exception(); }
  };

  Task(Task&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  Task(const Task&) = delete;
  Task& operator=(const Task&) = delete;
  Task& operator=(Task&&) = delete;
  ~Task() {
    if (handle_) handle_.destroy();
  }

  bool await_ready() const noexcept { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> caller) noexcept {
    handle_.promise().continuation = caller;
    return handle_;
  }
  void await_resume() {
    if (handle_.promise().error) std::rethrow_exception(handle_.promise().error);
  }

 private:
  explicit Task(std::coroutine_handle<promise_type> h) noexcept : handle_(h) {}
  std::coroutine_handle<promise_type> handle_;
};

/// One-shot completion flag a single process can wait on.
class Signal {
 public:
  explicit Signal(Simulation& sim) : sim_(sim) {}
  Signal(const Signal&) = delete;
  Signal& operator=(const Signal&) = delete;

  void trigger() {
    if (fired_) return;
    fired_ = true;
    if (waiter_) sim_.resume_now(std::exchange(waiter_, {}));
  }
  [[nodiscard]] bool fired() const noexcept { return fired_; }

  auto operator co_await() noexcept {
    struct Awaiter {
      Signal& signal;
      bool await_ready() const noexcept { return signal.fired_; }
      void await_suspend(std::coroutine_handle<> h) noexcept { signal.waiter_ = h; }
      void await_resume() const noexcept {}
    };
    return Awaiter{*this};
  }

 private:
  Simulation& sim_;
  bool fired_ = false;
  std::coroutine_handle<> waiter_;
};

}  // namespace phc::sim
