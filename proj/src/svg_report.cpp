/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/svg_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mealtrace::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(double width, double height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
         num(height) + "\">\n";
}

std::string rect(double x, double y, double w, double h, const char* fill) {
  return "  <rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char* stroke,
                 double width = 1.0) {
  return "  <line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
         "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
         num(width) + "\"/>\n";
}

std::string text(double x, double y, const std::string& s, int size = 11,
                 const char* anchor = "middle") {
  return "  <text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\"" +
         " font-size=\"" + std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" +
         escape(s) + "</text>\n";
}

std::string circle(double cx, double cy, double r, const char* fill) {
  return "  <circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
         "\" fill=\"" + fill + "\"/>\n";
}

}  // namespace

std::string routine_chart(const MealtimeRoutine& routine, const std::string& title) {
  const double width = 640, height = 320;
  const double left = 48, right = 16, top = 36, bottom = 40;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double max_p = 0.0;
  for (double p : routine.probabilities) max_p = std::max(max_p, p);
  if (max_p <= 0.0) max_p = 1.0;

  std::string out = header(width, height);
  out += rect(0, 0, width, height, "white");
  out += text(width / 2, 20, title, 13);
  out += line(left, top + plot_h, left + plot_w, top + plot_h, "#333");
  out += line(left, top, left, top + plot_h, "#333");
  out += text(14, top + plot_h / 2, "P", 11);
  out += text(left + plot_w / 2, height - 8, "hour of day", 11);

  const double bar_w = plot_w / 24.0;
  for (int h = 0; h < 24; ++h) {
    const double p = routine.probabilities[static_cast<std::size_t>(h)];
    const double bh = plot_h * (p / max_p);
    out += rect(left + h * bar_w + 1, top + plot_h - bh, bar_w - 2, bh, "#4878a8");
    if (h % 2 == 0) {
      out += text(left + h * bar_w + bar_w / 2, top + plot_h + 14, std::to_string(h), 9);
    }
  }
  out += text(left - 6, top + 4, num(max_p), 9, "end");
  out += "</svg>\n";
  return out;
}

std::string sigma_boxplot(std::span<const double> sigmas, const IqrFences& fences,
                          const std::vector<OutlierPoint>& outliers,
                          const std::string& title) {
  const double width = 320, height = 480;
  const double top = 44, bottom = 32;
  const double plot_h = height - top - bottom;
  const double cx = width / 2;
  const double box_w = 80;

  double lo = fences.lower_fence, hi = fences.upper_fence;
  for (double s : sigmas) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto y_of = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  // Whiskers reach the most extreme sigma still inside the fences.
  double whisker_lo = fences.q1, whisker_hi = fences.q3;
  for (double s : sigmas) {
    if (s >= fences.lower_fence) whisker_lo = std::min(whisker_lo, s);
    if (s <= fences.upper_fence) whisker_hi = std::max(whisker_hi, s);
  }
  std::vector<double> sorted(sigmas.begin(), sigmas.end());
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.empty() ? 0.0 : quantile_sorted(sorted, 0.5);

  std::string out = header(width, height);
  out += rect(0, 0, width, height, "white");
  out += text(cx, 20, title, 13);
  out += text(cx, 34, "sigma (mmol/L)", 10);

  out += line(cx, y_of(whisker_hi), cx, y_of(fences.q3), "#333");
  out += line(cx, y_of(fences.q1), cx, y_of(whisker_lo), "#333");
  out += line(cx - box_w / 4, y_of(whisker_hi), cx + box_w / 4, y_of(whisker_hi), "#333");
  out += line(cx - box_w / 4, y_of(whisker_lo), cx + box_w / 4, y_of(whisker_lo), "#333");

  out += "  <rect x=\"" + num(cx - box_w / 2) + "\" y=\"" + num(y_of(fences.q3)) +
         "\" width=\"" + num(box_w) + "\" height=\"" +
         num(y_of(fences.q1) - y_of(fences.q3)) +
         "\" fill=\"#d8e4f0\" stroke=\"#333\"/>\n";
  out += line(cx - box_w / 2, y_of(median), cx + box_w / 2, y_of(median), "#333", 2.0);

  for (const OutlierPoint& o : outliers) {
    out += circle(cx, y_of(o.sigma), 3, "#c03030");
  }

  out += text(cx + box_w / 2 + 8, y_of(fences.q3) + 4, "q3=" + num(fences.q3), 9, "start");
  out += text(cx + box_w / 2 + 8, y_of(fences.q1) + 4, "q1=" + num(fences.q1), 9, "start");
  out += "</svg>\n";
  return out;
}

std::string timeseries_chart(const ParticipantSeries& series,
                             const std::vector<Segment>& segments,
                             const std::vector<OutlierPoint>& candidates,
                             const std::string& title) {
  const double width = 1280, height = 360;
  const double left = 52, right = 16, top = 36, bottom = 40;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  const auto& samples = series.samples();
  std::string out = header(width, height);
  out += rect(0, 0, width, height, "white");
  out += text(width / 2, 20, title, 13);

  if (samples.empty()) {
    out += text(width / 2, height / 2, "no samples", 12);
    out += "</svg>\n";
    return out;
  }

  const std::int64_t t0 = samples.front().timestamp.epoch_seconds();
  const std::int64_t t1 = samples.back().timestamp.epoch_seconds();
  const double span = std::max<double>(1.0, static_cast<double>(t1 - t0));
  double vmin = samples.front().glucose_mmol_l, vmax = vmin;
  for (const GlucoseSample& s : samples) {
    vmin = std::min(vmin, s.glucose_mmol_l);
    vmax = std::max(vmax, s.glucose_mmol_l);
  }
  if (vmax <= vmin) vmax = vmin + 1.0;
  const double vpad = 0.05 * (vmax - vmin);
  vmin -= vpad;
  vmax += vpad;

  auto x_of = [&](const OffsetTime& t) {
    return left + plot_w * static_cast<double>(t.epoch_seconds() - t0) / span;
  };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - (v - vmin) / (vmax - vmin)); };

  // Day boundaries (local midnight) as light gridlines.
  const std::int64_t offset = series.utc_offset_seconds();
  std::int64_t local = samples.front().timestamp.local_epoch_seconds();
  std::int64_t midnight = (local / 86400 + 1) * 86400;
  for (; midnight - offset <= t1; midnight += 86400) {
    const OffsetTime tick(midnight - offset, offset);
    out += line(x_of(tick), top, x_of(tick), top + plot_h, "#dddddd");
  }

  for (const OutlierPoint& c : candidates) {
    out += line(x_of(c.anchor), top, x_of(c.anchor), top + plot_h, "#c03030");
  }

  for (const Segment& seg : segments) {
    std::string points;
    for (std::size_t i = seg.start_index; i <= seg.end_index; ++i) {
      points += num(x_of(samples[i].timestamp)) + "," + num(y_of(samples[i].glucose_mmol_l)) + " ";
    }
    if (!points.empty()) points.pop_back();
    out += "  <polyline fill=\"none\" stroke=\"#305080\" stroke-width=\"1\" points=\"" +
           points + "\"/>\n";
  }

  out += line(left, top + plot_h, left + plot_w, top + plot_h, "#333");
  out += line(left, top, left, top + plot_h, "#333");
  out += text(left - 6, y_of(vmin) + 4, num(vmin), 9, "end");
  out += text(left - 6, y_of(vmax) + 4, num(vmax), 9, "end");
  out += text(16, top + plot_h / 2, "mmol/L", 10, "start");
  out += text(left, height - 8, samples.front().timestamp.to_rfc3339(), 9, "start");
  out += text(left + plot_w, height - 8, samples.back().timestamp.to_rfc3339(), 9, "end");
  out += "</svg>\n";
  return out;
}

}  // namespace mealtrace::svg
