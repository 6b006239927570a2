#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace onsetbench {

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

/// Gregorian calendar date restricted to years 1900..2100.
class CalendarDate {
 public:
  CalendarDate() = default;
  CalendarDate(int year, unsigned month, unsigned day);

  static CalendarDate from_days(std::chrono::sys_days d);
  /// Parses YYYY-MM-DD.
  static CalendarDate parse(std::string_view text);

  int year() const { return static_cast<int>(ymd_.year()); }
  unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
  unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

  std::chrono::sys_days days() const { return std::chrono::sys_days{ymd_}; }
  /// 0 = Sunday .. 6 = Saturday.
  unsigned weekday() const;

  std::string iso() const;

  friend bool operator==(const CalendarDate& a, const CalendarDate& b) {
    return a.ymd_ == b.ymd_;
  }
  friend std::strong_ordering operator<=>(const CalendarDate& a,
                                          const CalendarDate& b) {
    return a.days().time_since_epoch().count() <=>
           b.days().time_since_epoch().count();
  }

 private:
  std::chrono::year_month_day ymd_{std::chrono::year{2000}, std::chrono::month{1},
                                   std::chrono::day{1}};
};

CalendarDate date_add(const CalendarDate& d, long n);
/// a - b in whole days.
long date_diff(const CalendarDate& a, const CalendarDate& b);

/// Day offset from March 1 of the date's own year (March 1 = 0, June 2 = 93).
/// Identical for the same month/day in leap and non-leap years from March on.
long season_day(const CalendarDate& d);
/// Inverse of season_day for a given year.
CalendarDate from_season_day(int year, long season_day);

/// Same month/day transplanted into another year (Feb 29 maps to Feb 28).
CalendarDate with_year(const CalendarDate& d, int year);

/// Month/day pair without a year, used for seasonal anchors such as June 2.
struct MonthDay {
  unsigned month = 1;
  unsigned day = 1;

  CalendarDate in(int year) const { return CalendarDate(year, month, day); }
  /// Parses MM-DD.
  static MonthDay parse(std::string_view text);
  std::string str() const;
  friend bool operator==(const MonthDay&, const MonthDay&) = default;
};

inline constexpr MonthDay kMokMedian{6, 2};
inline constexpr MonthDay kSeasonSearchStart{4, 1};
inline constexpr MonthDay kSeasonEnd{9, 30};
inline constexpr MonthDay kScheduleStart{5, 2};

}  // namespace onsetbench
