/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace mealtrace {

/// Proleptic Gregorian calendar date in some local frame.
struct LocalDate {
  int year = 1970;
  int month = 1;  // 1-12
  int day = 1;    // 1-31

  auto operator<=>(const LocalDate&) const = default;
};

std::string to_string(const LocalDate& date);          // YYYY-MM-DD
LocalDate parse_local_date(std::string_view text);     // throws parse_error

/// An instant with a fixed UTC offset, second precision.
///
/// Ordering and equality compare the instant (the UTC epoch second); the
/// offset only affects local-time derivations (hour of day, calendar date)
/// and the RFC3339 rendering.
class OffsetTime {
public:
  OffsetTime() = default;
  OffsetTime(std::int64_t epoch_seconds, std::int32_t utc_offset_seconds)
      : epoch_s_(epoch_seconds), offset_s_(utc_offset_seconds) {}

  /// Parses `YYYY-MM-DDTHH:MM:SS[.fff](Z|±HH:MM)`. Fractional seconds are
  /// accepted and truncated. Throws Error(parse_error) on anything else.
  static OffsetTime parse_rfc3339(std::string_view text);

  /// Renders with the carried offset; zero offset renders as `Z`.
  std::string to_rfc3339() const;

  std::int64_t epoch_seconds() const { return epoch_s_; }
  std::int32_t utc_offset_seconds() const { return offset_s_; }

  std::int64_t local_epoch_seconds() const { return epoch_s_ + offset_s_; }
  LocalDate local_date() const;
  int local_hour() const;  // 0-23

  friend bool operator==(const OffsetTime& a, const OffsetTime& b) {
    return a.epoch_s_ == b.epoch_s_;
  }
  friend std::strong_ordering operator<=>(const OffsetTime& a, const OffsetTime& b) {
    return a.epoch_s_ <=> b.epoch_s_;
  }

  friend OffsetTime operator+(const OffsetTime& t, std::chrono::seconds d) {
    return OffsetTime(t.epoch_s_ + d.count(), t.offset_s_);
  }
  friend OffsetTime operator-(const OffsetTime& t, std::chrono::seconds d) {
    return OffsetTime(t.epoch_s_ - d.count(), t.offset_s_);
  }
  friend std::chrono::seconds operator-(const OffsetTime& a, const OffsetTime& b) {
    return std::chrono::seconds(a.epoch_s_ - b.epoch_s_);
  }

private:
  std::int64_t epoch_s_ = 0;
  std::int32_t offset_s_ = 0;
};

/// Days since 1970-01-01 for a civil date (valid across the full int range).
std::int64_t days_from_civil(int year, int month, int day);
LocalDate civil_from_days(std::int64_t days);

/// Parses `±HH:MM` or `Z` into seconds east of UTC.
std::int32_t parse_utc_offset(std::string_view text);
std::string format_utc_offset(std::int32_t offset_seconds);

/// Parses `HH:MM` or `HH:MM:SS` clock time into seconds since local midnight.
std::chrono::seconds parse_clock_time(std::string_view text);

}  // namespace mealtrace
