/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/csvio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mealtrace/error.hpp"

namespace mealtrace {

namespace {

std::string location(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

std::string quote_csv(std::string_view field) {
  if (!needs_quoting(field)) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Minimal RFC4180 field splitter for one record line.
std::vector<std::string> split_csv_line(const std::string& line,
                                        const std::string& where) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      if (!current.empty()) fail(ErrorCode::parse_error, where + ": stray quote");
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
    ++i;
  }
  if (quoted) fail(ErrorCode::parse_error, where + ": unterminated quote");
  fields.push_back(std::move(current));
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

GlucoseSample make_sample(const std::string& timestamp, double value,
                          const std::string& where) {
  GlucoseSample s;
  try {
    s.timestamp = OffsetTime::parse_rfc3339(timestamp);
  } catch (const Error& e) {
    fail(ErrorCode::parse_error, where + ": " + e.what());
  }
  if (!std::isfinite(value) || value <= 0.0) {
    fail(ErrorCode::non_positive_value,
         where + ": glucose value must be finite and > 0");
  }
  s.glucose_mmol_l = value;
  return s;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, end);
}

double parse_double(std::string_view text, const std::string& context) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    fail(ErrorCode::parse_error, context + ": bad number '" + std::string(text) + "'");
  }
  return value;
}

std::vector<SampleRecord> read_samples_csv(std::istream& in, const std::string& source_name) {
  std::vector<SampleRecord> records;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) {
    fail(ErrorCode::parse_error, source_name + ": empty file (header required)");
  }
  ++line_no;
  if (strip_cr(line) != "participant_id,timestamp,glucose_mmol_l") {
    fail(ErrorCode::parse_error,
         location(source_name, line_no) +
             ": expected header 'participant_id,timestamp,glucose_mmol_l'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::string where = location(source_name, line_no);
    auto fields = split_csv_line(line, where);
    if (fields.size() != 3) {
      fail(ErrorCode::parse_error, where + ": expected 3 fields, got " +
                                       std::to_string(fields.size()));
    }
    if (fields[0].empty()) fail(ErrorCode::parse_error, where + ": empty participant_id");
    double value = parse_double(fields[2], where);
    records.push_back(SampleRecord{fields[0], make_sample(fields[1], value, where)});
  }
  return records;
}

std::vector<SampleRecord> read_samples_jsonl(std::istream& in, const std::string& source_name) {
  std::vector<SampleRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::string where = location(source_name, line_no);

    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      fail(ErrorCode::parse_error, where + ": not a JSON object");
    }
    if (!obj.contains("participant_id") || !obj["participant_id"].is_string() ||
        !obj.contains("timestamp") || !obj["timestamp"].is_string() ||
        !obj.contains("glucose_mmol_l") || !obj["glucose_mmol_l"].is_number()) {
      fail(ErrorCode::parse_error,
           where + ": requires participant_id, timestamp, glucose_mmol_l");
    }
    const std::string id = obj["participant_id"].get<std::string>();
    if (id.empty()) fail(ErrorCode::parse_error, where + ": empty participant_id");
    records.push_back(SampleRecord{
        id, make_sample(obj["timestamp"].get<std::string>(),
                        obj["glucose_mmol_l"].get<double>(), where)});
  }
  return records;
}

void write_samples_csv(std::ostream& out, const ParticipantSeries& series) {
  out << "participant_id,timestamp,glucose_mmol_l\n";
  const std::string id = quote_csv(series.participant_id());
  for (const GlucoseSample& s : series.samples()) {
    out << id << ',' << s.timestamp.to_rfc3339() << ','
        << format_double(s.glucose_mmol_l) << '\n';
  }
}

std::string sample_record_json(const std::string& participant_id,
                               const GlucoseSample& sample) {
  nlohmann::json obj;
  obj["participant_id"] = participant_id;
  obj["timestamp"] = sample.timestamp.to_rfc3339();
  obj["glucose_mmol_l"] = sample.glucose_mmol_l;
  return obj.dump();
}

std::vector<SampleRecord> read_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::storage_failure, "cannot open " + path);

  bool jsonl;
  if (path.ends_with(".csv")) {
    jsonl = false;
  } else if (path.ends_with(".jsonl") || path.ends_with(".ndjson")) {
    jsonl = true;
  } else {
    jsonl = in.peek() == '{';
  }
  return jsonl ? read_samples_jsonl(in, path) : read_samples_csv(in, path);
}

}  // namespace mealtrace
