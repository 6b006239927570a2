#include "onsetbench/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "onsetbench/error.hpp"

namespace onsetbench {

namespace {

void check_year(int year) {
  if (year < kMinYear || year > kMaxYear) {
    throw Error(ErrorKind::OutOfRange,
                "year " + std::to_string(year) + " outside supported range 1900-2100");
  }
}

unsigned parse_uint(std::string_view text, std::string_view whole) {
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::ParseError, "unparseable date '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::DisjointGrids: return "disjoint_grids";
    case ErrorKind::UnitMismatch: return "unit_mismatch";
    case ErrorKind::ShapeMismatch: return "shape_mismatch";
    case ErrorKind::MissingData: return "missing_data";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::Undecidable: return "undecidable";
    case ErrorKind::EnsembleSize: return "ensemble_size";
    case ErrorKind::Undefined: return "undefined";
    case ErrorKind::MalformedFile: return "malformed_file";
    case ErrorKind::LengthMismatch: return "length_mismatch";
    case ErrorKind::UnsupportedVersion: return "unsupported_version";
    case ErrorKind::DuplicateKey: return "duplicate_key";
    case ErrorKind::ParseError: return "parse_error";
    case ErrorKind::ConfigError: return "config_error";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

CalendarDate::CalendarDate(int year, unsigned month, unsigned day)
    : ymd_(std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}) {
  check_year(year);
  if (!ymd_.ok()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
    throw Error(ErrorKind::InvalidArgument, std::string("invalid calendar date ") + buf);
  }
}

CalendarDate CalendarDate::from_days(std::chrono::sys_days d) {
  std::chrono::year_month_day ymd{d};
  return CalendarDate(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()));
}

CalendarDate CalendarDate::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorKind::ParseError, "unparseable date '" + std::string(text) + "'");
  }
  const int y = static_cast<int>(parse_uint(text.substr(0, 4), text));
  const unsigned m = parse_uint(text.substr(5, 2), text);
  const unsigned d = parse_uint(text.substr(8, 2), text);
  try {
    return CalendarDate(y, m, d);
  } catch (const Error&) {
    throw Error(ErrorKind::ParseError, "unparseable date '" + std::string(text) + "'");
  }
}

unsigned CalendarDate::weekday() const {
  return std::chrono::weekday{days()}.c_encoding();
}

std::string CalendarDate::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

CalendarDate date_add(const CalendarDate& d, long n) {
  return CalendarDate::from_days(d.days() + std::chrono::days{n});
}

long date_diff(const CalendarDate& a, const CalendarDate& b) {
  return static_cast<long>((a.days() - b.days()).count());
}

long season_day(const CalendarDate& d) {
  return date_diff(d, CalendarDate(d.year(), 3, 1));
}

CalendarDate from_season_day(int year, long season_day) {
  return date_add(CalendarDate(year, 3, 1), season_day);
}

CalendarDate with_year(const CalendarDate& d, int year) {
  unsigned day = d.day();
  if (d.month() == 2 && day == 29 && !std::chrono::year{year}.is_leap()) day = 28;
  return CalendarDate(year, d.month(), day);
}

MonthDay MonthDay::parse(std::string_view text) {
  if (text.size() != 5 || text[2] != '-') {
    throw Error(ErrorKind::ParseError, "unparseable month-day '" + std::string(text) + "'");
  }
  MonthDay md{parse_uint(text.substr(0, 2), text), parse_uint(text.substr(3, 2), text)};
  // 2000 is a leap year, so Feb 29 is accepted.
  (void)md.in(2000);
  return md;
}

std::string MonthDay::str() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02u-%02u", month, day);
  return buf;
}

}  // namespace onsetbench
