/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/audit.hpp"

#include <cmath>

#include "mealtrace/error.hpp"

namespace mealtrace {

StudyWindow StudyWindow::make(OffsetTime start, OffsetTime end) {
  if (!(start < end)) fail(ErrorCode::invalid_spec, "study window requires start < end");
  return StudyWindow{start, end};
}

std::int64_t expected_samples(const OffsetTime& start, const OffsetTime& end,
                              std::chrono::seconds period) {
  if (period.count() <= 0) fail(ErrorCode::invalid_spec, "period must be > 0");
  const std::int64_t span = (end - start).count();
  if (span <= 0) return 0;
  return span / period.count();
}

std::int64_t expected_samples(const StudyWindow& window, std::chrono::seconds period) {
  return expected_samples(window.start, window.end, period);
}

double round_half_up_1dp(double value) {
  return std::floor(value * 10.0 + 0.5) / 10.0;
}

namespace {

LocalDate next_day(const LocalDate& d) {
  return civil_from_days(days_from_civil(d.year, d.month, d.day) + 1);
}

}  // namespace

std::map<LocalDate, std::int64_t> daily_counts(const ParticipantSeries& series,
                                               const StudyWindow& window) {
  // Bin by the calendar the participant lives in. An empty series has no
  // offset of its own, so the window's applies.
  const std::int32_t offset = series.empty()
                                  ? window.start.utc_offset_seconds()
                                  : series.utc_offset_seconds();

  std::map<LocalDate, std::int64_t> counts;
  const LocalDate first = OffsetTime(window.start.epoch_seconds(), offset).local_date();
  const LocalDate last =
      OffsetTime(window.end.epoch_seconds() - 1, offset).local_date();
  for (LocalDate d = first; d <= last; d = next_day(d)) counts[d] = 0;

  for (const GlucoseSample& s : series.samples()) {
    if (s.timestamp < window.start || !(s.timestamp < window.end)) continue;
    counts[s.timestamp.local_date()] += 1;
  }
  return counts;
}

CompletenessReport completeness(const ParticipantSeries& series,
                                const StudyWindow& window,
                                std::chrono::seconds period,
                                double threshold_pct) {
  CompletenessReport report;
  report.participant_id = series.participant_id();
  report.expected = expected_samples(window, period);
  report.daily_counts = daily_counts(series, window);
  for (const auto& [date, n] : report.daily_counts) report.collected += n;

  report.percentage =
      report.expected > 0
          ? round_half_up_1dp(100.0 * static_cast<double>(report.collected) /
                              static_cast<double>(report.expected))
          : 0.0;
  report.included = report.percentage > threshold_pct;
  return report;
}

}  // namespace mealtrace
