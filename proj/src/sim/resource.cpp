#include "phc/sim/resource.hpp"

namespace phc::sim {

PriorityResource::PriorityResource(Simulation& sim, std::string name, std::size_t capacity)
    : sim_(sim),
      name_(std::move(name)),
      servers_(capacity),
      busy_(sim.now()),
      background_(sim.now()),
      queued_(sim.now()) {
  if (capacity == 0) throw std::invalid_argument("resource '" + name_ + "' needs capacity >= 1");
}

std::optional<std::size_t> PriorityResource::free_server() const {
  // Truly idle servers first, then servers that are only doing background work.
  std::optional<std::size_t> preemptible;
  for (std::size_t i = 0; i < servers_.size(); ++i) {
    if (servers_[i].holding) continue;
    if (!servers_[i].in_background) return i;
    if (!preemptible) preemptible = i;
  }
  return preemptible;
}

bool PriorityResource::try_grant(Request& r) {
  r.id = next_id_++;
  // A free server implies an empty queue: releases hand servers over directly.
  if (queue_length() != 0) return false;
  const auto s = free_server();
  if (!s) return false;
  give(r, *s);
  return true;
}

void PriorityResource::enqueue(Request& r) {
  auto& q = queue_[static_cast<int>(r.tier)];
  q.push_back(&r);
  queued_.add(sim_.now(), 1.0);
}

void PriorityResource::arm_timeout(Request& r, Minutes patience) {
  auto& q = queue_[static_cast<int>(r.tier)];
  const std::uint64_t id = r.id;
  pending_timeouts_.emplace(id, std::prev(q.end()));
  sim_.schedule(sim_.now() + patience, [this, id, tier = r.tier] {
    auto it = pending_timeouts_.find(id);
    if (it == pending_timeouts_.end()) return;
    Request* req = *it->second;
    queue_[static_cast<int>(tier)].erase(it->second);
    pending_timeouts_.erase(it);
    queued_.add(sim_.now(), -1.0);
    ++timed_out_;
    req->handle.resume();
  });
}

void PriorityResource::give(Request& r, std::size_t server) {
  Server& s = servers_[server];
  if (s.in_background) stop_background(server);
  s.holding = true;
  ++holders_;
  ++granted_;
  busy_.add(sim_.now(), 1.0);
  r.grant = Grant{r.requested_at, sim_.now(), server, r.tier};
  const double w = r.grant->wait();
  waits_[static_cast<int>(r.tier)].add(w);
  all_waits_.add(w);
}

void PriorityResource::release(const Grant& grant) {
  if (grant.server >= servers_.size() || !servers_[grant.server].holding) {
    throw ContractViolation("release of a server not held on '" + name_ + "'");
  }
  Server& s = servers_[grant.server];
  s.holding = false;
  --holders_;
  ++released_;
  busy_.add(sim_.now(), -1.0);

  for (auto& q : queue_) {
    if (q.empty()) continue;
    Request* next = q.front();
    q.pop_front();
    pending_timeouts_.erase(next->id);
    queued_.add(sim_.now(), -1.0);
    give(*next, grant.server);
    sim_.resume_now(next->handle);
    return;
  }
  start_background(grant.server);
}

void PriorityResource::add_background_work(Minutes total) {
  if (!(total >= 0.0)) throw ContractViolation("negative background work");
  const double share = total / static_cast<double>(servers_.size());
  for (std::size_t i = 0; i < servers_.size(); ++i) add_background_work(i, share);
}

void PriorityResource::add_background_work(std::size_t server, Minutes minutes) {
  if (!(minutes >= 0.0)) throw ContractViolation("negative background work");
  Server& s = servers_.at(server);
  if (s.in_background) stop_background(server);
  s.backlog += minutes;
  if (!s.holding) start_background(server);
}

void PriorityResource::stop_background(std::size_t server) {
  Server& s = servers_[server];
  s.backlog = std::max(0.0, s.backlog - (sim_.now() - s.background_started));
  s.in_background = false;
  ++s.token;
  --background_active_;
  background_.add(sim_.now(), -1.0);
}

void PriorityResource::start_background(std::size_t server) {
  Server& s = servers_[server];
  if (s.holding || s.in_background || s.backlog <= 0.0) return;
  s.in_background = true;
  s.background_started = sim_.now();
  ++background_active_;
  background_.add(sim_.now(), 1.0);
  const std::uint64_t token = ++s.token;
  sim_.schedule(sim_.now() + s.backlog, [this, server, token] {
    Server& srv = servers_[server];
    if (srv.token != token || !srv.in_background) return;
    srv.backlog = 0.0;
    srv.in_background = false;
    --background_active_;
    background_.add(sim_.now(), -1.0);
  });
}

Minutes PriorityResource::background_backlog() const {
  Minutes total = 0.0;
  for (const Server& s : servers_) {
    total += s.backlog;
    if (s.in_background) total -= sim_.now() - s.background_started;
  }
  return std::max(0.0, total);
}

double PriorityResource::busy_minutes() const {
  return busy_.integral(sim_.now()) + background_.integral(sim_.now());
}

void PriorityResource::reset_statistics() {
  const Minutes t = sim_.now();
  busy_.update(t, busy_.current());
  background_.update(t, background_.current());
  queued_.update(t, queued_.current());
  busy_.reset(t);
  background_.reset(t);
  queued_.reset(t);
  waits_[0].reset();
  waits_[1].reset();
  all_waits_.reset();
}

}  // namespace phc::sim
