#include <doctest.h>

#include <memory>
#include <random>
#include <vector>

#include "phc/sim/process.hpp"

using namespace phc::sim;

TEST_CASE("equal-time events fire in insertion order") {
  Calendar cal;
  std::vector<int> order;
  cal.schedule(5.0, [&] { order.push_back(1); });
  cal.schedule(5.0, [&] { order.push_back(2); });
  while (cal.step()) {}
  CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("events fire in time order") {
  Calendar cal;
  std::vector<double> times;
  for (double t : {3.0, 1.0, 2.0}) cal.schedule(t, [&] { times.push_back(cal.now()); });
  while (cal.step()) {}
  CHECK(times == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("empty calendar signals the end") {
  Calendar cal;
  CHECK(cal.empty());
  CHECK_FALSE(cal.next_time().has_value());
  CHECK_FALSE(cal.step());
}

TEST_CASE("scheduling in the past is a contract violation") {
  Calendar cal;
  cal.schedule(10.0, [] {});
  cal.step();
  CHECK_THROWS_AS(cal.schedule(9.0, [] {}), ContractViolation);
  CHECK_THROWS_AS(cal.schedule(std::nan(""), [] {}), ContractViolation);
  CHECK_THROWS_AS(cal.run_until(5.0), ContractViolation);
}

TEST_CASE("run_until stops at the horizon and leaves later events pending") {
  Calendar cal;
  int fired = 0;
  cal.schedule(1.0, [&] { ++fired; });
  cal.schedule(2.0, [&] { ++fired; });
  cal.schedule(2.5, [&] { ++fired; });
  cal.run_until(2.0);
  CHECK(fired == 2);
  CHECK(cal.now() == 2.0);
  CHECK(cal.pending() == 1);
}

TEST_CASE("property: random interleavings dispatch in (time, insertion) order") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Calendar cal;
    struct Fired {
      double time;
      int seq;
    };
    std::vector<Fired> fired;
    int seq = 0;
    std::uniform_int_distribution<int> coarse(0, 20);
    // Events scheduled from inside other events too.
    for (int i = 0; i < 40; ++i) {
      const double t = coarse(rng);
      const int s = seq++;
      cal.schedule(t, [&, s] {
        fired.push_back({cal.now(), s});
        if (s % 3 == 0) {
          const int s2 = seq++;
          cal.schedule(cal.now() + coarse(rng) % 3, [&, s2] { fired.push_back({cal.now(), s2}); });
        }
      });
    }
    while (cal.step()) {}
    for (std::size_t i = 1; i < fired.size(); ++i) {
      REQUIRE(fired[i - 1].time <= fired[i].time);
      if (fired[i - 1].time == fired[i].time) REQUIRE(fired[i - 1].seq < fired[i].seq);
    }
  }
}

namespace {

Process sleeper(Simulation& sim, double d, std::vector<double>& log) {
  co_await sim.delay(d);
  log.push_back(sim.now());
}

Process waiter(Simulation& sim, Signal& s, std::vector<double>& log) {
  co_await s;
  log.push_back(sim.now());
}

Process forever(Simulation& sim) {
  for (;;) co_await sim.delay(1.0);
}

}  // namespace

TEST_CASE("processes delay and finish") {
  Simulation sim;
  std::vector<double> log;
  sim.spawn(sleeper(sim, 4.0, log));
  sim.spawn(sleeper(sim, 2.0, log));
  CHECK(sim.live_processes() == 2);
  while (sim.step()) {}
  CHECK(log == std::vector<double>{2.0, 4.0});
  CHECK(sim.live_processes() == 0);
  CHECK_THROWS_AS(sim.delay(-1.0), ContractViolation);
}

TEST_CASE("signal wakes its waiter at the trigger time") {
  Simulation sim;
  std::vector<double> log;
  Signal s(sim);
  sim.spawn(waiter(sim, s, log));
  sim.schedule(7.0, [&] { s.trigger(); });
  while (sim.step()) {}
  CHECK(log == std::vector<double>{7.0});
}

TEST_CASE("suspended processes are reclaimed with the simulation") {
  auto sim = std::make_unique<Simulation>();
  sim->spawn(forever(*sim));
  sim->run_until(10.0);
  CHECK(sim->live_processes() == 1);
  sim.reset();  // must not leak or crash under sanitizers
}
