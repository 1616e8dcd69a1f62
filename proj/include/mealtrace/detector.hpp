/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mealtrace/series.hpp"

namespace mealtrace {

struct DetectorConfig {
  int window_len = 3;                     // samples per sliding window
  double iqr_factor = 1.5;                // fence multiplier
  std::chrono::seconds merge_gap{30 * 60};  // candidates closer than this share an event
  bool require_positive_delta = true;     // rising-edge filter

  void validate() const;  // window_len >= 2, iqr_factor > 0, merge_gap >= 0
};

/// Standard deviation of one sliding window, anchored at the window's first
/// sample (the detection marks the beginning of a glucose change).
struct StdPoint {
  OffsetTime anchor;
  double sigma = 0.0;          // population std dev of the window, mmol/L
  double glucose_delta = 0.0;  // last minus first window value, mmol/L
};

struct IqrFences {
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower_fence = 0.0;  // q1 - factor * iqr
  double upper_fence = 0.0;  // q3 + factor * iqr
};

enum class OutlierSide { above, below };

constexpr const char* to_string(OutlierSide side) {
  return side == OutlierSide::above ? "above" : "below";
}

struct OutlierPoint {
  OffsetTime anchor;
  double sigma = 0.0;
  OutlierSide side = OutlierSide::above;
  double glucose_delta = 0.0;
};

/// A temporal cluster of candidate outliers, treated as one eating occasion.
struct MealEvent {
  OffsetTime start;
  OffsetTime end;
  std::int64_t outlier_count = 0;
  double max_delta = 0.0;
};

/// Hour-of-day histogram of meal candidates across all observed days.
struct MealtimeRoutine {
  std::array<std::int64_t, 24> counts{};
  std::array<double, 24> probabilities{};
};

/// One StdPoint per run of window_len consecutive samples inside a segment;
/// windows never cross segment boundaries. Segments shorter than the window
/// contribute nothing.
std::vector<StdPoint> sliding_std(const ParticipantSeries& series,
                                  const std::vector<Segment>& segments,
                                  const DetectorConfig& cfg);

/// Lower/upper quartile of `value` at sorted position p*(n-1), p = 0..1,
/// by linear interpolation between the bracketing order statistics.
double quantile_sorted(std::span<const double> sorted_values, double p);

/// Quartiles plus Tukey fences over a non-empty value set.
/// Throws Error(empty_input) for an empty span.
IqrFences iqr_fences(std::span<const double> values, double factor);

/// Every point strictly outside a fence, order preserved.
std::vector<OutlierPoint> detect_outliers(const std::vector<StdPoint>& std_points,
                                          const IqrFences& fences);

/// Above-fence outliers only; with require_positive_delta, additionally
/// restricted to windows whose glucose rose (rising-edge semantics).
std::vector<OutlierPoint> meal_candidates(const std::vector<OutlierPoint>& outliers,
                                          const DetectorConfig& cfg);

/// Clusters candidates: consecutive anchors <= merge_gap apart share an event.
std::vector<MealEvent> group_meal_events(const std::vector<OutlierPoint>& candidates,
                                         const DetectorConfig& cfg);

/// Hour-of-day counts and normalized probabilities.
/// Throws Error(no_candidates) for an empty candidate list.
MealtimeRoutine mealtime_routine(const std::vector<OutlierPoint>& candidates);

struct Analysis {
  std::vector<Segment> segments;
  std::vector<StdPoint> std_points;
  IqrFences fences;
  std::vector<OutlierPoint> outliers;
  std::vector<OutlierPoint> candidates;
  std::vector<MealEvent> events;
  std::optional<MealtimeRoutine> routine;  // absent when there are no candidates
};

/// Runs the pipeline up to event grouping; routine is present only when
/// candidates exist. Throws Error(insufficient_data) when no segment
/// reaches window_len.
Analysis analyze_stages(const ParticipantSeries& series, const SamplingSpec& spec,
                        const DetectorConfig& cfg);

/// Full pipeline; additionally throws Error(no_candidates) when the
/// candidate list is empty, so the returned routine is always present.
Analysis analyze(const ParticipantSeries& series, const SamplingSpec& spec,
                 const DetectorConfig& cfg);

}  // namespace mealtrace
