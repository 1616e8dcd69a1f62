/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/report_json.hpp"

#include <fstream>

#include "mealtrace/error.hpp"

namespace mealtrace {

namespace {

nlohmann::json outlier_to_json(const OutlierPoint& o) {
  nlohmann::json obj;
  obj["timestamp"] = o.anchor.to_rfc3339();
  obj["sigma"] = o.sigma;
  obj["side"] = to_string(o.side);
  obj["delta"] = o.glucose_delta;
  return obj;
}

}  // namespace

nlohmann::json analysis_to_json(const std::string& participant_id, const Analysis& analysis) {
  nlohmann::json doc;
  doc["participant_id"] = participant_id;

  auto& std_points = doc["std_points"] = nlohmann::json::array();
  for (const StdPoint& p : analysis.std_points) {
    nlohmann::json obj;
    obj["timestamp"] = p.anchor.to_rfc3339();
    obj["sigma"] = p.sigma;
    obj["delta"] = p.glucose_delta;
    std_points.push_back(std::move(obj));
  }

  doc["fences"] = {{"q1", analysis.fences.q1},
                   {"q3", analysis.fences.q3},
                   {"iqr", analysis.fences.iqr},
                   {"lower", analysis.fences.lower_fence},
                   {"upper", analysis.fences.upper_fence}};

  auto& outliers = doc["outliers"] = nlohmann::json::array();
  for (const OutlierPoint& o : analysis.outliers) outliers.push_back(outlier_to_json(o));

  auto& candidates = doc["candidates"] = nlohmann::json::array();
  for (const OutlierPoint& o : analysis.candidates) candidates.push_back(outlier_to_json(o));

  doc["events"] = events_to_json(analysis.events);

  if (analysis.routine) {
    doc["routine"] = {{"counts", analysis.routine->counts},
                      {"probabilities", analysis.routine->probabilities}};
  } else {
    doc["routine"] = nullptr;
  }
  return doc;
}

std::string analysis_document(const std::string& participant_id, const Analysis& analysis) {
  return analysis_to_json(participant_id, analysis).dump(2) + "\n";
}

nlohmann::json completeness_to_json(const CompletenessReport& report) {
  nlohmann::json daily = nlohmann::json::object();
  for (const auto& [date, count] : report.daily_counts) {
    daily[to_string(date)] = count;
  }
  return nlohmann::json{{"participant_id", report.participant_id},
                        {"collected", report.collected},
                        {"expected", report.expected},
                        {"percentage", report.percentage},
                        {"included", report.included},
                        {"daily_counts", std::move(daily)}};
}

std::string completeness_document(const CompletenessReport& report) {
  return completeness_to_json(report).dump(2) + "\n";
}

nlohmann::json events_to_json(const std::vector<MealEvent>& events) {
  nlohmann::json arr = nlohmann::json::array();
  for (const MealEvent& e : events) {
    arr.push_back({{"start", e.start.to_rfc3339()},
                   {"end", e.end.to_rfc3339()},
                   {"count", e.outlier_count},
                   {"max_delta", e.max_delta}});
  }
  return arr;
}

std::string events_document(const std::vector<MealEvent>& events) {
  return events_to_json(events).dump(2) + "\n";
}

std::string error_document(ErrorCode code, const std::string& message) {
  return nlohmann::json{{"error", to_string(code)}, {"message", message}}.dump(2) + "\n";
}

namespace {

[[noreturn]] void bad_profile(const std::string& what) {
  fail(ErrorCode::invalid_profile, "invalid profile: " + what);
}

void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                const char* where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* k : allowed) {
      if (key == k) {
        known = true;
        break;
      }
    }
    if (!known) bad_profile("unknown key '" + key + "' in " + where);
  }
}

double require_number(const nlohmann::json& obj, const char* key, double fallback,
                      bool required = false) {
  if (!obj.contains(key)) {
    if (required) bad_profile(std::string("missing '") + key + "'");
    return fallback;
  }
  if (!obj[key].is_number()) bad_profile(std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

std::string require_string(const nlohmann::json& obj, const char* key,
                           const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) bad_profile(std::string("'") + key + "' must be a string");
  return obj[key].get<std::string>();
}

}  // namespace

synth::SynthProfile profile_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) bad_profile("profile must be a JSON object");
  check_keys(doc,
             {"participant_id", "baseline", "meals", "noise_sd", "days", "period_s",
              "offset", "start_date", "seed", "dropout"},
             "profile");

  synth::SynthProfile p;
  p.participant_id = require_string(doc, "participant_id", p.participant_id);
  p.baseline = require_number(doc, "baseline", 0.0, /*required=*/true);
  p.noise_sd = require_number(doc, "noise_sd", 0.0);
  p.days = static_cast<int>(require_number(doc, "days", 1.0));
  p.period = std::chrono::seconds(
      static_cast<std::int64_t>(require_number(doc, "period_s", 300.0)));
  p.seed = static_cast<std::uint64_t>(require_number(doc, "seed", 0.0));

  try {
    p.utc_offset_seconds = parse_utc_offset(require_string(doc, "offset", "Z"));
    p.start_date = parse_local_date(require_string(doc, "start_date", "2024-01-01"));
  } catch (const Error& e) {
    bad_profile(e.what());
  }

  if (doc.contains("meals")) {
    if (!doc["meals"].is_array()) bad_profile("'meals' must be an array");
    for (const auto& m : doc["meals"]) {
      if (!m.is_object()) bad_profile("each meal must be an object");
      check_keys(m, {"clock_time", "rise", "rise_duration_min", "decay_halflife_min"},
                 "meal");
      synth::MealSpec meal;
      try {
        meal.clock_time = parse_clock_time(require_string(m, "clock_time", "08:00"));
      } catch (const Error& e) {
        bad_profile(e.what());
      }
      meal.rise = require_number(m, "rise", 0.0, /*required=*/true);
      meal.rise_duration = std::chrono::seconds(
          static_cast<std::int64_t>(require_number(m, "rise_duration_min", 30.0) * 60.0));
      meal.decay_halflife = std::chrono::seconds(static_cast<std::int64_t>(
          require_number(m, "decay_halflife_min", 60.0) * 60.0));
      p.meals.push_back(meal);
    }
  }

  if (doc.contains("dropout")) {
    const auto& d = doc["dropout"];
    if (!d.is_object()) bad_profile("'dropout' must be an object");
    check_keys(d, {"uniform_rate", "block_gaps"}, "dropout");
    p.dropout.uniform_rate = require_number(d, "uniform_rate", 0.0);
    if (d.contains("block_gaps")) {
      if (!d["block_gaps"].is_array()) bad_profile("'block_gaps' must be an array");
      for (const auto& g : d["block_gaps"]) {
        if (!g.is_object()) bad_profile("each block gap must be an object");
        check_keys(g, {"start_s", "duration_s"}, "block gap");
        synth::BlockGap gap;
        gap.start = std::chrono::seconds(
            static_cast<std::int64_t>(require_number(g, "start_s", 0.0, true)));
        gap.duration = std::chrono::seconds(
            static_cast<std::int64_t>(require_number(g, "duration_s", 0.0, true)));
        p.dropout.block_gaps.push_back(gap);
      }
    }
  }
  return p;
}

synth::SynthProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::storage_failure, "cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) bad_profile("not valid JSON: " + path);
  return profile_from_json(doc);
}

std::string truth_document(const std::vector<OffsetTime>& onsets) {
  nlohmann::json arr = nlohmann::json::array();
  for (const OffsetTime& t : onsets) arr.push_back(t.to_rfc3339());
  return arr.dump(2) + "\n";
}

}  // namespace mealtrace
