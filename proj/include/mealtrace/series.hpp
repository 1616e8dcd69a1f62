/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "mealtrace/timeutil.hpp"

namespace mealtrace {

/// One timestamped blood glucose reading in mmol/L.
struct GlucoseSample {
  OffsetTime timestamp;
  double glucose_mmol_l = 0.0;

  /// Outside the plausible physiologic range. Flagged, never rejected.
  bool implausible() const {
    return glucose_mmol_l < 2.0 || glucose_mmol_l > 30.0;
  }
};

struct SamplingSpec {
  std::chrono::seconds nominal_period{300};
  std::chrono::seconds contiguity_tolerance{450};

  void validate() const;  // 0 < period <= tolerance
};

/// Maximal contiguous run of samples, inclusive indices into a series.
struct Segment {
  std::size_t start_index = 0;
  std::size_t end_index = 0;

  std::size_t length() const { return end_index - start_index + 1; }
};

/// A participant's glucose timeseries: samples strictly ascending by
/// timestamp, no duplicate instants, one shared UTC offset. Immutable;
/// construct through build_series().
class ParticipantSeries {
public:
  ParticipantSeries() = default;

  const std::string& participant_id() const { return participant_id_; }
  const std::vector<GlucoseSample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }

  /// Offset shared by every sample; zero for an empty series.
  std::int32_t utc_offset_seconds() const { return offset_s_; }

  friend ParticipantSeries build_series(std::string participant_id,
                                        std::vector<GlucoseSample> raw_samples);

private:
  std::string participant_id_;
  std::vector<GlucoseSample> samples_;
  std::int32_t offset_s_ = 0;
};

/// Sorts, collapses exact duplicates, and validates. Throws:
///   non_positive_value     value not finite and strictly positive
///   conflicting_duplicate  same timestamp, different values
///   mixed_offsets          samples carry more than one UTC offset
ParticipantSeries build_series(std::string participant_id,
                               std::vector<GlucoseSample> raw_samples);

/// Splits a series into maximal runs whose inter-sample spacing never
/// exceeds the contiguity tolerance. Sliding windows must not cross the
/// returned boundaries.
std::vector<Segment> segment_contiguous(const ParticipantSeries& series,
                                        const SamplingSpec& spec);

}  // namespace mealtrace
