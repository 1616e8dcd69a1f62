/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <span>
#include <string>
#include <vector>

#include "mealtrace/detector.hpp"
#include "mealtrace/series.hpp"

namespace mealtrace::svg {

// Static SVG renderers for the report charts. Output is deterministic
// (fixed canvas sizes, %.2f coordinates), which keeps the files golden-
// testable.

/// 24-bar hour-of-day mealtime probability chart.
std::string routine_chart(const MealtimeRoutine& routine, const std::string& title);

/// Boxplot of the sigma vector with fence whiskers and outlier dots.
std::string sigma_boxplot(std::span<const double> sigmas, const IqrFences& fences,
                          const std::vector<OutlierPoint>& outliers,
                          const std::string& title);

/// Glucose timeseries (one polyline per segment, so gaps stay visible)
/// with vertical markers at candidate anchors.
std::string timeseries_chart(const ParticipantSeries& series,
                             const std::vector<Segment>& segments,
                             const std::vector<OutlierPoint>& candidates,
                             const std::string& title);

}  // namespace mealtrace::svg
