#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sentilag {

/// Calendar date as days since 1970-01-01 (proleptic Gregorian).
struct Date {
  std::int32_t days = 0;

  static Date from_ymd(int y, unsigned m, unsigned d);
  /// Accepts YYYY-MM-DD; throws Error otherwise.
  static Date parse(std::string_view iso);

  std::string iso() const;
  /// 0 = Monday ... 6 = Sunday.
  int weekday() const;
  bool is_weekend() const { return weekday() >= 5; }

  Date operator+(int n) const { return Date{days + n}; }
  Date operator-(int n) const { return Date{days - n}; }
  int operator-(Date o) const { return days - o.days; }
  auto operator<=>(const Date&) const = default;
};

/// Offset of the working timezone from UTC in minutes (UTC+8 = 480).
struct TzOffset {
  int minutes = 480;
};

/// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t seconds = 0;

  /// ISO-8601 `YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|±HH[:MM]]`. A bare local
  /// time is interpreted in `tz`.
  static Timestamp parse(std::string_view iso, TzOffset tz);

  /// Rendered in `tz` with an explicit offset suffix.
  std::string iso(TzOffset tz) const;
  Date local_date(TzOffset tz) const;

  auto operator<=>(const Timestamp&) const = default;
};

struct DateRange {
  Date first;
  Date last;

  bool contains(Date d) const { return first <= d && d <= last; }
};

}  // namespace sentilag
