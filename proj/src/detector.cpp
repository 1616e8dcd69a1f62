/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/detector.hpp"

#include <algorithm>
#include <cmath>

#include "mealtrace/error.hpp"

namespace mealtrace {

void DetectorConfig::validate() const {
  if (window_len < 2) fail(ErrorCode::invalid_spec, "window_len must be >= 2");
  if (!(iqr_factor > 0.0)) fail(ErrorCode::invalid_spec, "iqr_factor must be > 0");
  if (merge_gap.count() < 0) fail(ErrorCode::invalid_spec, "merge_gap must be >= 0");
}

std::vector<StdPoint> sliding_std(const ParticipantSeries& series,
                                  const std::vector<Segment>& segments,
                                  const DetectorConfig& cfg) {
  cfg.validate();
  const auto& samples = series.samples();
  const std::size_t w = static_cast<std::size_t>(cfg.window_len);

  std::vector<StdPoint> points;
  for (const Segment& seg : segments) {
    if (seg.length() < w) continue;
    for (std::size_t i = seg.start_index; i + w - 1 <= seg.end_index; ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k < w; ++k) sum += samples[i + k].glucose_mmol_l;
      const double mean = sum / static_cast<double>(w);
      double sq = 0.0;
      for (std::size_t k = 0; k < w; ++k) {
        const double dev = samples[i + k].glucose_mmol_l - mean;
        sq += dev * dev;
      }
      StdPoint p;
      p.anchor = samples[i].timestamp;
      p.sigma = std::sqrt(sq / static_cast<double>(w));
      p.glucose_delta = samples[i + w - 1].glucose_mmol_l - samples[i].glucose_mmol_l;
      points.push_back(p);
    }
  }
  return points;
}

double quantile_sorted(std::span<const double> sorted_values, double p) {
  const std::size_t n = sorted_values.size();
  if (n == 1) return sorted_values[0];
  const double pos = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= n) return sorted_values[lo];
  return sorted_values[lo] * (1.0 - frac) + sorted_values[lo + 1] * frac;
}

IqrFences iqr_fences(std::span<const double> values, double factor) {
  if (values.empty()) fail(ErrorCode::empty_input, "iqr_fences requires a non-empty vector");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  IqrFences f;
  f.q1 = quantile_sorted(sorted, 0.25);
  f.q3 = quantile_sorted(sorted, 0.75);
  f.iqr = f.q3 - f.q1;
  f.lower_fence = f.q1 - factor * f.iqr;
  f.upper_fence = f.q3 + factor * f.iqr;
  return f;
}

std::vector<OutlierPoint> detect_outliers(const std::vector<StdPoint>& std_points,
                                          const IqrFences& fences) {
  std::vector<OutlierPoint> outliers;
  for (const StdPoint& p : std_points) {
    // "falling outside" is strict: a value equal to the fence is inside.
    if (p.sigma > fences.upper_fence) {
      outliers.push_back({p.anchor, p.sigma, OutlierSide::above, p.glucose_delta});
    } else if (p.sigma < fences.lower_fence) {
      outliers.push_back({p.anchor, p.sigma, OutlierSide::below, p.glucose_delta});
    }
  }
  return outliers;
}

std::vector<OutlierPoint> meal_candidates(const std::vector<OutlierPoint>& outliers,
                                          const DetectorConfig& cfg) {
  std::vector<OutlierPoint> candidates;
  for (const OutlierPoint& o : outliers) {
    if (o.side != OutlierSide::above) continue;
    if (cfg.require_positive_delta && !(o.glucose_delta > 0.0)) continue;
    candidates.push_back(o);
  }
  return candidates;
}

std::vector<MealEvent> group_meal_events(const std::vector<OutlierPoint>& candidates,
                                         const DetectorConfig& cfg) {
  std::vector<MealEvent> events;
  for (const OutlierPoint& c : candidates) {
    if (!events.empty() && c.anchor - events.back().end <= cfg.merge_gap) {
      MealEvent& e = events.back();
      e.end = c.anchor;
      e.outlier_count += 1;
      e.max_delta = std::max(e.max_delta, c.glucose_delta);
    } else {
      events.push_back(MealEvent{c.anchor, c.anchor, 1, c.glucose_delta});
    }
  }
  return events;
}

MealtimeRoutine mealtime_routine(const std::vector<OutlierPoint>& candidates) {
  if (candidates.empty()) {
    fail(ErrorCode::no_candidates, "no meal candidates to bin into a routine");
  }
  MealtimeRoutine routine;
  for (const OutlierPoint& c : candidates) {
    routine.counts[static_cast<std::size_t>(c.anchor.local_hour())] += 1;
  }
  const double total = static_cast<double>(candidates.size());
  for (std::size_t h = 0; h < 24; ++h) {
    routine.probabilities[h] = static_cast<double>(routine.counts[h]) / total;
  }
  return routine;
}

Analysis analyze_stages(const ParticipantSeries& series, const SamplingSpec& spec,
                        const DetectorConfig& cfg) {
  Analysis a;
  a.segments = segment_contiguous(series, spec);
  a.std_points = sliding_std(series, a.segments, cfg);
  if (a.std_points.empty()) {
    fail(ErrorCode::insufficient_data,
         "no segment reaches the sliding window length");
  }
  std::vector<double> sigmas;
  sigmas.reserve(a.std_points.size());
  for (const StdPoint& p : a.std_points) sigmas.push_back(p.sigma);

  a.fences = iqr_fences(sigmas, cfg.iqr_factor);
  a.outliers = detect_outliers(a.std_points, a.fences);
  a.candidates = meal_candidates(a.outliers, cfg);
  a.events = group_meal_events(a.candidates, cfg);
  if (!a.candidates.empty()) a.routine = mealtime_routine(a.candidates);
  return a;
}

Analysis analyze(const ParticipantSeries& series, const SamplingSpec& spec,
                 const DetectorConfig& cfg) {
  Analysis a = analyze_stages(series, spec, cfg);
  if (!a.routine) {
    fail(ErrorCode::no_candidates, "no meal candidates detected");
  }
  return a;
}

}  // namespace mealtrace
