#include <doctest.h>

#include "suborbit/schedule.hpp"

using namespace suborbit;

TEST_CASE("schedule values are exact multiples of the grid") {
  const PowerSchedule s = schedule_from_values({Rational(0), Rational(5, 4), Rational(3)}, 4);
  CHECK(s.size() == 3);
  CHECK(s.steps == std::vector<std::int64_t>{0, 5, 12});
  CHECK(s.alpha(2) == Rational(5, 4));
  CHECK(s.gap(2) == Rational(7, 4));
  CHECK(s.integer_alpha(3) == 3);
  CHECK_THROWS_AS(s.integer_alpha(2), PreconditionError);
  CHECK_THROWS_AS(s.alpha(0), IndexError);
  CHECK_THROWS_AS(s.alpha(4), IndexError);
  CHECK_THROWS_AS(s.gap(3), IndexError);
  CHECK(s.provenance.size() == 2);
  CHECK(to_string(s.provenance.front()) == "explicit");
}

TEST_CASE("validation rejects malformed schedules") {
  CHECK_THROWS_AS(schedule_from_values({}), ScheduleViolation);
  CHECK_THROWS_AS(schedule_from_values({Rational(1), Rational(2)}), ScheduleViolation);
  CHECK_THROWS_AS(schedule_from_values({Rational(0), Rational(2), Rational(2)}), ScheduleViolation);
  CHECK_THROWS_AS(schedule_from_values({Rational(0), Rational(1, 3)}, 4), GridMismatch);
  CHECK_NOTHROW(schedule_from_values({Rational(0)}));
}

TEST_CASE("every gap rule has a stable name") {
  CHECK(to_string(GapRule::support) == "support");
  CHECK(to_string(GapRule::budget) == "budget");
  CHECK(to_string(GapRule::closed_form) == "closed_form");
  CHECK(to_string(GapRule::admissibility) == "admissibility");
  CHECK(to_string(GapRule::localization) == "localization");
}
