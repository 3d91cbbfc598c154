#pragma once

// gcc/time.hpp — UTC timestamps at second precision, rendered as RFC 3339
// (YYYY-MM-DDTHH:MM:SSZ). The clock is a plain function object so tests and
// replay scripts can pin time exactly; every stored timestamp goes through
// format_timestamp, so repositories never contain sub-second or local-zone
// values.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace gcc {

using UnixSeconds = std::int64_t;
using Clock = std::function<UnixSeconds()>;

inline UnixSeconds system_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

inline Clock system_clock_utc() {
  return [] { return system_now(); };
}

inline Clock fixed_clock(UnixSeconds t) {
  return [t] { return t; };
}

namespace detail {

// Proleptic Gregorian calendar <-> day counts (days since 1970-01-01).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0,399]
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;   // [0,365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0,146096]
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

inline CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);          // [0,146096]
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);          // [0,365]
  const unsigned mp = (5 * doy + 2) / 153;                               // [0,11]
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;                       // [1,31]
  const unsigned m = mp + (mp < 10 ? 3 : -9);                            // [1,12]
  return {y + (m <= 2), m, d};
}

inline bool is_leap(std::int64_t y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned kDays[12] = {31, 28, 31, 30, 31, 30,
                                         31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

inline void append_padded(std::string& out, std::int64_t value, int width) {
  std::string digits = std::to_string(value);
  for (int i = static_cast<int>(digits.size()); i < width; ++i) out += '0';
  out += digits;
}

}  // namespace detail

inline std::string format_timestamp(UnixSeconds t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  const detail::CivilDate date = detail::civil_from_days(days);
  std::string out;
  out.reserve(20);
  detail::append_padded(out, date.year, 4);
  out += '-';
  detail::append_padded(out, date.month, 2);
  out += '-';
  detail::append_padded(out, date.day, 2);
  out += 'T';
  detail::append_padded(out, rem / 3600, 2);
  out += ':';
  detail::append_padded(out, (rem / 60) % 60, 2);
  out += ':';
  detail::append_padded(out, rem % 60, 2);
  out += 'Z';
  return out;
}

// Strict parse of the exact shape produced by format_timestamp. Returns
// nullopt on any deviation (wrong length, bad separators, out-of-range
// fields, nonexistent calendar day).
inline std::optional<UnixSeconds> parse_timestamp(std::string_view s) {
  if (s.size() != 20) return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':' || s[19] != 'Z') {
    return std::nullopt;
  }
  auto digits = [&](std::size_t pos, std::size_t len,
                    std::int64_t& out) -> bool {
    out = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
      out = out * 10 + (s[i] - '0');
    }
    return true;
  };
  std::int64_t year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!digits(0, 4, year) || !digits(5, 2, month) || !digits(8, 2, day) ||
      !digits(11, 2, hour) || !digits(14, 2, minute) ||
      !digits(17, 2, second)) {
    return std::nullopt;
  }
  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 ||
      day > detail::days_in_month(year, static_cast<unsigned>(month))) {
    return std::nullopt;
  }
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
  const std::int64_t days = detail::days_from_civil(
      year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  return days * 86400 + hour * 3600 + minute * 60 + second;
}

}  // namespace gcc
