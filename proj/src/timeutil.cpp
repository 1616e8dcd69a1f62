/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/timeutil.hpp"

#include <charconv>
#include <cstdio>

#include "mealtrace/error.hpp"

namespace mealtrace {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

bool is_leap(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
  static constexpr int table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return table[m - 1];
}

// Parses exactly `width` digits at text[pos..], advancing pos.
int take_digits(std::string_view text, size_t& pos, size_t width, const char* what) {
  if (pos + width > text.size()) fail(ErrorCode::parse_error, std::string("truncated ") + what);
  int value = 0;
  for (size_t i = 0; i < width; ++i) {
    char c = text[pos + i];
    if (c < '0' || c > '9') fail(ErrorCode::parse_error, std::string("bad digit in ") + what);
    value = value * 10 + (c - '0');
  }
  pos += width;
  return value;
}

void expect(std::string_view text, size_t& pos, char c, const char* what) {
  if (pos >= text.size() || text[pos] != c) {
    fail(ErrorCode::parse_error, std::string("expected '") + c + "' in " + what);
  }
  ++pos;
}

}  // namespace

// Low-level calendar conversions after Hinnant's civil algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

LocalDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return LocalDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

std::string to_string(const LocalDate& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", date.year, date.month, date.day);
  return buf;
}

LocalDate parse_local_date(std::string_view text) {
  size_t pos = 0;
  int y = take_digits(text, pos, 4, "date year");
  expect(text, pos, '-', "date");
  int m = take_digits(text, pos, 2, "date month");
  expect(text, pos, '-', "date");
  int d = take_digits(text, pos, 2, "date day");
  if (pos != text.size()) fail(ErrorCode::parse_error, "trailing characters after date");
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
    fail(ErrorCode::parse_error, "calendar date out of range: " + std::string(text));
  }
  return LocalDate{y, m, d};
}

std::int32_t parse_utc_offset(std::string_view text) {
  if (text == "Z" || text == "z") return 0;
  if (text.size() != 6 || (text[0] != '+' && text[0] != '-')) {
    fail(ErrorCode::parse_error, "bad UTC offset: " + std::string(text));
  }
  size_t pos = 1;
  int h = take_digits(text, pos, 2, "offset hours");
  expect(text, pos, ':', "offset");
  int m = take_digits(text, pos, 2, "offset minutes");
  if (h > 23 || m > 59) fail(ErrorCode::parse_error, "UTC offset out of range: " + std::string(text));
  std::int32_t total = h * 3600 + m * 60;
  return text[0] == '-' ? -total : total;
}

std::string format_utc_offset(std::int32_t offset_seconds) {
  if (offset_seconds == 0) return "Z";
  char sign = offset_seconds < 0 ? '-' : '+';
  std::int32_t abs = offset_seconds < 0 ? -offset_seconds : offset_seconds;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%c%02d:%02d", sign, abs / 3600, (abs % 3600) / 60);
  return buf;
}

std::chrono::seconds parse_clock_time(std::string_view text) {
  size_t pos = 0;
  int h = take_digits(text, pos, 2, "clock hours");
  expect(text, pos, ':', "clock time");
  int m = take_digits(text, pos, 2, "clock minutes");
  int s = 0;
  if (pos < text.size()) {
    expect(text, pos, ':', "clock time");
    s = take_digits(text, pos, 2, "clock seconds");
  }
  if (pos != text.size() || h > 23 || m > 59 || s > 59) {
    fail(ErrorCode::parse_error, "bad clock time: " + std::string(text));
  }
  return std::chrono::seconds(h * 3600 + m * 60 + s);
}

OffsetTime OffsetTime::parse_rfc3339(std::string_view text) {
  size_t pos = 0;
  int year = take_digits(text, pos, 4, "year");
  expect(text, pos, '-', "timestamp");
  int month = take_digits(text, pos, 2, "month");
  expect(text, pos, '-', "timestamp");
  int day = take_digits(text, pos, 2, "day");
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't')) {
    fail(ErrorCode::parse_error, "expected 'T' separator in timestamp");
  }
  ++pos;
  int hour = take_digits(text, pos, 2, "hours");
  expect(text, pos, ':', "timestamp");
  int minute = take_digits(text, pos, 2, "minutes");
  expect(text, pos, ':', "timestamp");
  int second = take_digits(text, pos, 2, "seconds");
  // Truncate any fractional seconds; the pipeline is second precision.
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      ++pos;
      ++digits;
    }
    if (digits == 0) fail(ErrorCode::parse_error, "empty fractional seconds");
  }
  std::int32_t offset = parse_utc_offset(text.substr(pos));

  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) ||
      hour > 23 || minute > 59 || second > 59) {
    fail(ErrorCode::parse_error, "timestamp fields out of range: " + std::string(text));
  }
  std::int64_t local = days_from_civil(year, month, day) * kSecondsPerDay +
                       hour * 3600 + minute * 60 + second;
  return OffsetTime(local - offset, offset);
}

std::string OffsetTime::to_rfc3339() const {
  const std::int64_t local = local_epoch_seconds();
  const LocalDate date = civil_from_days(floor_div(local, kSecondsPerDay));
  const std::int64_t sod = floor_mod(local, kSecondsPerDay);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lld",
                date.year, date.month, date.day,
                static_cast<long long>(sod / 3600),
                static_cast<long long>((sod % 3600) / 60),
                static_cast<long long>(sod % 60));
  return buf + format_utc_offset(offset_s_);
}

LocalDate OffsetTime::local_date() const {
  return civil_from_days(floor_div(local_epoch_seconds(), kSecondsPerDay));
}

int OffsetTime::local_hour() const {
  return static_cast<int>(floor_mod(local_epoch_seconds(), kSecondsPerDay) / 3600);
}

}  // namespace mealtrace
