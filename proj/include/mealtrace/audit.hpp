/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>

#include "mealtrace/series.hpp"

namespace mealtrace {

/// Half-open observation window [start, end).
struct StudyWindow {
  OffsetTime start;
  OffsetTime end;

  static StudyWindow make(OffsetTime start, OffsetTime end);  // requires start < end
};

/// Samples a perfectly behaved sensor would deliver: floor((end-start)/period).
std::int64_t expected_samples(const OffsetTime& start, const OffsetTime& end,
                              std::chrono::seconds period);
std::int64_t expected_samples(const StudyWindow& window, std::chrono::seconds period);

struct CompletenessReport {
  std::string participant_id;
  std::int64_t collected = 0;
  std::int64_t expected = 0;
  double percentage = 0.0;  // 100 * collected / expected, rounded half-up to 1 decimal
  bool included = false;    // percentage strictly above the threshold
  std::map<LocalDate, std::int64_t> daily_counts;  // one entry per window date
};

/// Rounds half-up to one decimal place (table presentation rule).
double round_half_up_1dp(double value);

/// Per-day sample counts over the window's local calendar dates; dates with
/// no samples are present with count 0. Dates are local to the series offset
/// (the window's offset for an empty series).
std::map<LocalDate, std::int64_t> daily_counts(const ParticipantSeries& series,
                                               const StudyWindow& window);

/// Data-completeness accounting over a study window, with the inclusion gate
/// applied to the rounded percentage.
CompletenessReport completeness(const ParticipantSeries& series,
                                const StudyWindow& window,
                                std::chrono::seconds period,
                                double threshold_pct = 50.0);

}  // namespace mealtrace
