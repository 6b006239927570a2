#include "catch_amalgamated.hpp"

#include "onsetbench/calendar.hpp"
#include "onsetbench/error.hpp"

using namespace onsetbench;

TEST_CASE("date arithmetic") {
  CHECK(date_add(CalendarDate(2024, 2, 28), 1) == CalendarDate(2024, 2, 29));
  CHECK(date_add(CalendarDate(2023, 2, 28), 1) == CalendarDate(2023, 3, 1));
  CHECK(date_diff(CalendarDate(2020, 6, 2), CalendarDate(2020, 5, 2)) == 31);
  CHECK(date_diff(CalendarDate(2025, 6, 2), CalendarDate(2024, 6, 2)) == 365);
  CHECK(date_diff(CalendarDate(2024, 6, 2), CalendarDate(2023, 6, 2)) == 366);
  CHECK(date_add(CalendarDate(2020, 1, 1), -1) == CalendarDate(2019, 12, 31));
}

TEST_CASE("add and diff are inverse") {
  const CalendarDate base(1950, 7, 14);
  for (long n = -18000; n <= 18000; n += 137) {
    CHECK(date_diff(date_add(base, n), base) == n);
  }
}

TEST_CASE("invalid dates are rejected") {
  CHECK_THROWS_AS(CalendarDate(2023, 2, 29), Error);
  CHECK_THROWS_AS(CalendarDate(2023, 13, 1), Error);
  CHECK_THROWS_AS(CalendarDate(1899, 12, 31), Error);
  CHECK_THROWS_AS(CalendarDate(2101, 1, 1), Error);
  CHECK_THROWS_AS(date_add(CalendarDate(2100, 12, 31), 1), Error);
  CHECK_THROWS_AS(CalendarDate::parse("2020-6-1x"), Error);
  CHECK_THROWS_AS(CalendarDate::parse("2020-02-30"), Error);
}

TEST_CASE("parse, format and weekday") {
  const auto d = CalendarDate::parse("2024-05-02");
  CHECK(d.iso() == "2024-05-02");
  CHECK(d.weekday() == 4);  // Thursday
  CHECK(CalendarDate(2024, 5, 6).weekday() == 1);
  CHECK(MonthDay::parse("06-02") == kMokMedian);
  CHECK(kMokMedian.str() == "06-02");
}

TEST_CASE("season day lines up leap and non-leap years") {
  CHECK(season_day(CalendarDate(2024, 6, 2)) == 93);
  CHECK(season_day(CalendarDate(2023, 6, 2)) == 93);
  CHECK(season_day(CalendarDate(2024, 3, 1)) == 0);
  CHECK(from_season_day(2001, 93) == CalendarDate(2001, 6, 2));
  CHECK(with_year(CalendarDate(2024, 2, 29), 2023) == CalendarDate(2023, 2, 28));
}
