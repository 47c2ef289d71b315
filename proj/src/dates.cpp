#include "sentilag/dates.hpp"

#include "sentilag/error.hpp"

#include <cctype>
#include <algorithm>
#include <cstdio>

namespace sentilag {

namespace {

// Howard Hinnant's civil-calendar algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<int>(static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2));
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(int y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kDays[m - 1];
}

int parse_fixed(std::string_view s, std::size_t pos, std::size_t width, std::string_view whole) {
  if (pos + width > s.size()) {
    throw Error("malformed date/time '" + std::string(whole) + "'");
  }
  int value = 0;
  for (std::size_t k = pos; k < pos + width; ++k) {
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) {
      throw Error("malformed date/time '" + std::string(whole) + "'");
    }
    value = value * 10 + (s[k] - '0');
  }
  return value;
}

void expect(std::string_view s, std::size_t pos, char c, std::string_view whole) {
  if (pos >= s.size() || s[pos] != c) {
    throw Error("malformed date/time '" + std::string(whole) + "'");
  }
}

}  // namespace

Date Date::from_ymd(int y, unsigned m, unsigned d) {
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
    throw Error("invalid calendar date " + std::to_string(y) + "-" + std::to_string(m) + "-" +
                std::to_string(d));
  }
  return Date{static_cast<std::int32_t>(days_from_civil(y, m, d))};
}

Date Date::parse(std::string_view iso) {
  if (iso.size() != 10) {
    throw Error("malformed date '" + std::string(iso) + "', expected YYYY-MM-DD");
  }
  const int y = parse_fixed(iso, 0, 4, iso);
  expect(iso, 4, '-', iso);
  const int m = parse_fixed(iso, 5, 2, iso);
  expect(iso, 7, '-', iso);
  const int d = parse_fixed(iso, 8, 2, iso);
  return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::iso() const {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  civil_from_days(days, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
  return buf;
}

int Date::weekday() const {
  // 1970-01-01 was a Thursday (index 3).
  const int w = (days % 7 + 7 + 3) % 7;
  return w;
}

Timestamp Timestamp::parse(std::string_view iso, TzOffset tz) {
  const Date date = Date::parse(iso.substr(0, std::min<std::size_t>(10, iso.size())));
  std::size_t pos = 10;
  int hh = 0;
  int mm = 0;
  int ss = 0;
  if (pos < iso.size()) {
    if (iso[pos] != 'T' && iso[pos] != ' ') {
      throw Error("malformed timestamp '" + std::string(iso) + "'");
    }
    hh = parse_fixed(iso, pos + 1, 2, iso);
    expect(iso, pos + 3, ':', iso);
    mm = parse_fixed(iso, pos + 4, 2, iso);
    pos += 6;
    if (pos < iso.size() && iso[pos] == ':') {
      ss = parse_fixed(iso, pos + 1, 2, iso);
      pos += 3;
      if (pos < iso.size() && (iso[pos] == '.' || iso[pos] == ',')) {
        ++pos;
        while (pos < iso.size() && std::isdigit(static_cast<unsigned char>(iso[pos]))) {
          ++pos;  // second precision; fraction truncated
        }
      }
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) {
    throw Error("time of day out of range in '" + std::string(iso) + "'");
  }
  int offset_minutes = tz.minutes;
  if (pos < iso.size()) {
    if (iso[pos] == 'Z' || iso[pos] == 'z') {
      offset_minutes = 0;
      ++pos;
    } else if (iso[pos] == '+' || iso[pos] == '-') {
      const int sign = iso[pos] == '-' ? -1 : 1;
      const int oh = parse_fixed(iso, pos + 1, 2, iso);
      pos += 3;
      int om = 0;
      if (pos < iso.size() && iso[pos] == ':') {
        ++pos;
      }
      if (pos < iso.size()) {
        om = parse_fixed(iso, pos, 2, iso);
        pos += 2;
      }
      offset_minutes = sign * (oh * 60 + om);
    }
    if (pos != iso.size()) {
      throw Error("trailing characters in timestamp '" + std::string(iso) + "'");
    }
  }
  const std::int64_t local = static_cast<std::int64_t>(date.days) * 86400 + hh * 3600 + mm * 60 + ss;
  return Timestamp{local - static_cast<std::int64_t>(offset_minutes) * 60};
}

Date Timestamp::local_date(TzOffset tz) const {
  const std::int64_t local = seconds + static_cast<std::int64_t>(tz.minutes) * 60;
  std::int64_t day = local / 86400;
  if (local % 86400 < 0) {
    --day;
  }
  return Date{static_cast<std::int32_t>(day)};
}

std::string Timestamp::iso(TzOffset tz) const {
  const std::int64_t local = seconds + static_cast<std::int64_t>(tz.minutes) * 60;
  const Date d = local_date(tz);
  const auto secs = local - static_cast<std::int64_t>(d.days) * 86400;
  const int off = tz.minutes < 0 ? -tz.minutes : tz.minutes;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02d%c%02d:%02d", d.iso().c_str(),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60), tz.minutes < 0 ? '-' : '+', off / 60, off % 60);
  return buf;
}

}  // namespace sentilag
