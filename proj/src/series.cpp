/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/series.hpp"

#include <algorithm>
#include <cmath>

#include "mealtrace/error.hpp"

namespace mealtrace {

void SamplingSpec::validate() const {
  if (nominal_period.count() <= 0 || contiguity_tolerance < nominal_period) {
    fail(ErrorCode::invalid_spec,
         "sampling spec requires 0 < nominal_period <= contiguity_tolerance");
  }
}

ParticipantSeries build_series(std::string participant_id,
                               std::vector<GlucoseSample> raw_samples) {
  if (participant_id.empty()) {
    fail(ErrorCode::invalid_participant_id, "participant_id must be non-empty");
  }
  for (const GlucoseSample& s : raw_samples) {
    if (!std::isfinite(s.glucose_mmol_l) || s.glucose_mmol_l <= 0.0) {
      fail(ErrorCode::non_positive_value,
           "glucose value must be finite and > 0 at " + s.timestamp.to_rfc3339());
    }
  }

  std::stable_sort(raw_samples.begin(), raw_samples.end(),
                   [](const GlucoseSample& a, const GlucoseSample& b) {
                     return a.timestamp < b.timestamp;
                   });

  std::vector<GlucoseSample> samples;
  samples.reserve(raw_samples.size());
  for (const GlucoseSample& s : raw_samples) {
    if (!samples.empty() && samples.back().timestamp == s.timestamp) {
      if (samples.back().glucose_mmol_l == s.glucose_mmol_l) continue;  // exact duplicate
      fail(ErrorCode::conflicting_duplicate,
           "conflicting values at " + s.timestamp.to_rfc3339());
    }
    samples.push_back(s);
  }

  for (const GlucoseSample& s : samples) {
    if (s.timestamp.utc_offset_seconds() != samples.front().timestamp.utc_offset_seconds()) {
      fail(ErrorCode::mixed_offsets,
           "series mixes UTC offsets (hour-of-day binning would be ambiguous)");
    }
  }

  ParticipantSeries series;
  series.participant_id_ = std::move(participant_id);
  series.offset_s_ = samples.empty() ? 0 : samples.front().timestamp.utc_offset_seconds();
  series.samples_ = std::move(samples);
  return series;
}

std::vector<Segment> segment_contiguous(const ParticipantSeries& series,
                                        const SamplingSpec& spec) {
  spec.validate();
  std::vector<Segment> segments;
  const auto& samples = series.samples();
  if (samples.empty()) return segments;

  std::size_t start = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].timestamp - samples[i - 1].timestamp > spec.contiguity_tolerance) {
      segments.push_back(Segment{start, i - 1});
      start = i;
    }
  }
  segments.push_back(Segment{start, samples.size() - 1});
  return segments;
}

}  // namespace mealtrace
