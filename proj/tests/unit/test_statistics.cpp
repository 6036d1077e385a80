#include <doctest.h>

#include <vector>

#include "phc/sim/schedule.hpp"
#include "phc/sim/statistics.hpp"

using namespace phc::sim;

TEST_CASE("time-weighted mean of a step signal is exact") {
  TimeWeighted tw(0.0, 0.0);
  tw.update(2.0, 3.0);
  tw.update(5.0, 1.0);
  // 0 on [0,2), 3 on [2,5), 1 on [5,10): area 9 + 5 = 14.
  CHECK(tw.integral(10.0) == doctest::Approx(14.0));
  CHECK(tw.mean(10.0) == doctest::Approx(1.4));
  tw.reset(10.0);
  CHECK(tw.mean(20.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(tw.update(5.0, 0.0), ContractViolation);
}

TEST_CASE("tally matches sample formulas") {
  Tally t;
  for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) t.add(x);
  CHECK(t.mean() == doctest::Approx(5.0));
  CHECK(t.variance() == doctest::Approx(32.0 / 7.0));
  CHECK(t.min() == 2.0);
  CHECK(t.max() == 9.0);
  Tally empty;
  CHECK(empty.mean() == 0.0);
  CHECK(empty.sd() == 0.0);
}

TEST_CASE("utilization arithmetic") {
  CHECK(utilization(411.0, 360.0) == doctest::Approx(1.142).epsilon(1e-3));
  CHECK(utilization(0.0, 360.0) == 0.0);
  CHECK(utilization(180.0, 360.0) == doctest::Approx(0.5));
  CHECK_THROWS((void)utilization(10.0, 0.0));
}

TEST_CASE("daily window arithmetic") {
  const DailySchedule opd{480.0, 840.0, true};
  CHECK(opd.window_length() == 360.0);
  CHECK(opd.is_open(480.0));
  CHECK_FALSE(opd.is_open(840.0));
  CHECK(opd.is_open(1440.0 + 600.0));
  CHECK(opd.next_open(100.0) == 480.0);
  CHECK(opd.next_open(500.0) == 500.0);
  CHECK(opd.next_open(900.0) == 1440.0 + 480.0);
  CHECK(opd.close_of(1440.0 + 500.0) == 1440.0 + 840.0);
  CHECK(opd.scheduled_minutes(0.0, 3 * 1440.0, 2.0) == doctest::Approx(2 * 3 * 360.0));
  CHECK(opd.scheduled_minutes(600.0, 1440.0 + 500.0) == doctest::Approx(240.0 + 20.0));
  CHECK(opd.from_open_time(0.0) == 480.0);
  CHECK(opd.from_open_time(370.0) == doctest::Approx(1440.0 + 490.0));
  CHECK(opd.to_open_time(opd.from_open_time(1234.5)) == doctest::Approx(1234.5));
  CHECK_THROWS(DailySchedule{900.0, 800.0, true}.validate());
}
