/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mealtrace/series.hpp"

namespace mealtrace {

struct SampleRecord {
  std::string participant_id;
  GlucoseSample sample;
};

/// Shortest round-trip decimal rendering (re-parsing yields the same bits).
std::string format_double(double value);

/// Strict full-string parse. `context` prefixes the error message.
double parse_double(std::string_view text, const std::string& context);

/// Reads the `participant_id,timestamp,glucose_mmol_l` CSV schema.
/// RFC4180 quoting is honored. Errors carry `source_name:line`.
std::vector<SampleRecord> read_samples_csv(std::istream& in, const std::string& source_name);

/// Reads the JSON-lines alternative: one object per line with keys
/// `participant_id`, `timestamp`, `glucose_mmol_l`. Blank lines are skipped.
std::vector<SampleRecord> read_samples_jsonl(std::istream& in, const std::string& source_name);

/// Writes header plus one row per sample.
void write_samples_csv(std::ostream& out, const ParticipantSeries& series);

/// Serializes one sample to a JSON-lines record (no trailing newline).
std::string sample_record_json(const std::string& participant_id, const GlucoseSample& sample);

/// Reads either format, dispatching on the file extension (`.csv` vs
/// `.jsonl`/`.ndjson`); anything else is sniffed from the first byte.
std::vector<SampleRecord> read_samples_file(const std::string& path);

}  // namespace mealtrace
