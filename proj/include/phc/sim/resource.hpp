#pragma once

#include <coroutine>
#include <cstdint>
#include <list>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "phc/sim/process.hpp"
#include "phc/sim/statistics.hpp"

namespace phc::sim {

enum class Tier : int { high = 0, low = 1 };

struct Grant {
  Minutes requested_at = 0.0;
  Minutes granted_at = 0.0;
  std::size_t server = 0;
  Tier tier = Tier::low;
  [[nodiscard]] Minutes wait() const noexcept { return granted_at - requested_at; }
};

/// Pool of identical servers with a two-tier nonpreemptive priority queue.
///
/// Invariants:
///   - a high-tier request joins behind every queued high-tier request and
///     ahead of every low-tier one;
///   - a held server is never taken away; holders <= capacity;
///   - granted == released + holders.
///
/// Each server also carries a backlog of background work (administration)
/// that it performs only while it would otherwise be idle. Background work is
/// preempted by any request and resumes when the server frees up again. Both
/// kinds of work count as busy time.
class PriorityResource {
 public:
  PriorityResource(Simulation& sim, std::string name, std::size_t capacity);
  PriorityResource(const PriorityResource&) = delete;
  PriorityResource& operator=(const PriorityResource&) = delete;

  struct Request {
    Tier tier;
    Minutes requested_at;
    std::uint64_t id = 0;
    std::coroutine_handle<> handle;
    std::optional<Grant> grant;
  };

  class Acquire {
   public:
    bool await_ready() { return resource_.try_grant(request_); }
    void await_suspend(std::coroutine_handle<> h) {
      request_.handle = h;
      resource_.enqueue(request_);
    }
    Grant await_resume() { return *request_.grant; }

   private:
    friend class PriorityResource;
    Acquire(PriorityResource& r, Tier tier) : resource_(r), request_{tier, r.sim_.now(), 0, {}, std::nullopt} {}
    PriorityResource& resource_;
    Request request_;
  };

  /// Like Acquire, but gives up after `patience` minutes in the queue.
  class AcquireWithin {
   public:
    bool await_ready() { return resource_.try_grant(request_); }
    void await_suspend(std::coroutine_handle<> h) {
      request_.handle = h;
      resource_.enqueue(request_);
      resource_.arm_timeout(request_, patience_);
    }
    std::optional<Grant> await_resume() { return request_.grant; }

   private:
    friend class PriorityResource;
    AcquireWithin(PriorityResource& r, Tier tier, Minutes patience)
        : resource_(r), request_{tier, r.sim_.now(), 0, {}, std::nullopt}, patience_(patience) {}
    PriorityResource& resource_;
    Request request_;
    Minutes patience_;
  };

  /// `Grant g = co_await res.acquire(tier);`
  [[nodiscard]] Acquire acquire(Tier tier) { return Acquire{*this, tier}; }

  /// `std::optional<Grant> g = co_await res.acquire_within(tier, patience);`
  [[nodiscard]] AcquireWithin acquire_within(Tier tier, Minutes patience) {
    if (!(patience >= 0.0)) throw ContractViolation("negative patience");
    return AcquireWithin{*this, tier, patience};
  }

  /// Frees the server; the head of the queue (if any) is granted at once.
  void release(const Grant& grant);

  /// Adds background work split equally over all servers.
  void add_background_work(Minutes total);
  void add_background_work(std::size_t server, Minutes minutes);

  /// Restarts all accumulators at the current clock.
  void reset_statistics();

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::size_t capacity() const noexcept { return servers_.size(); }
  [[nodiscard]] std::size_t holders() const noexcept { return holders_; }
  [[nodiscard]] std::size_t queue_length() const noexcept {
    return queue_[0].size() + queue_[1].size();
  }
  [[nodiscard]] std::size_t queue_length(Tier t) const noexcept {
    return queue_[static_cast<int>(t)].size();
  }
  [[nodiscard]] std::uint64_t granted() const noexcept { return granted_; }
  [[nodiscard]] std::uint64_t released() const noexcept { return released_; }
  [[nodiscard]] std::uint64_t timed_out() const noexcept { return timed_out_; }
  [[nodiscard]] Minutes background_backlog() const;

  [[nodiscard]] Minutes statistics_since() const noexcept { return busy_.origin(); }
  /// Busy server-minutes since the last reset (requests plus background).
  [[nodiscard]] double busy_minutes() const;
  [[nodiscard]] double request_busy_minutes() const { return busy_.integral(sim_.now()); }
  [[nodiscard]] double background_busy_minutes() const { return background_.integral(sim_.now()); }
  /// Time-averaged number of queued requests since the last reset.
  [[nodiscard]] double mean_queue_length() const { return queued_.mean(sim_.now()); }
  /// Waits of requests granted since the last reset, by tier and combined.
  [[nodiscard]] const Tally& waits(Tier t) const { return waits_[static_cast<int>(t)]; }
  [[nodiscard]] const Tally& waits() const { return all_waits_; }

 private:
  struct Server {
    bool holding = false;
    bool in_background = false;
    Minutes backlog = 0.0;
    Minutes background_started = 0.0;
    std::uint64_t token = 0;
  };

  bool try_grant(Request& r);
  void enqueue(Request& r);
  void arm_timeout(Request& r, Minutes patience);
  void give(Request& r, std::size_t server);
  std::optional<std::size_t> free_server() const;
  void stop_background(std::size_t server);
  void start_background(std::size_t server);

  Simulation& sim_;
  std::string name_;
  std::vector<Server> servers_;
  std::list<Request*> queue_[2];
  std::unordered_map<std::uint64_t, std::list<Request*>::iterator> pending_timeouts_;
  std::uint64_t next_id_ = 1;
  std::size_t holders_ = 0;
  std::size_t background_active_ = 0;
  std::uint64_t granted_ = 0;
  std::uint64_t released_ = 0;
  std::uint64_t timed_out_ = 0;
  TimeWeighted busy_;
  TimeWeighted background_;
  TimeWeighted queued_;
  Tally waits_[2];
  Tally all_waits_;
};

}  // namespace phc::sim
