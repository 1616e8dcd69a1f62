/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "mealtrace/series.hpp"

namespace mealtrace {

/// Append-only per-participant sample log.
///
/// One JSON-lines file per participant under the root directory; records are
/// the module CSV schema rendered as JSON objects. Appends are atomic per
/// batch (single write + fsync) and serialized per participant; reads
/// rebuild the series from the file on every call, so there is no cache to
/// go stale.
class SampleLog {
public:
  explicit SampleLog(std::filesystem::path root);  // creates root if missing

  struct AppendResult {
    std::int64_t accepted = 0;
    std::int64_t duplicates = 0;
    std::int64_t implausible = 0;  // among the accepted samples
  };

  /// Validates, dedups against the stored records and within the batch, and
  /// appends the genuinely new samples. A value conflict rejects the whole
  /// batch with nothing written.
  AppendResult append_samples(const std::string& participant_id,
                              std::span<const GlucoseSample> samples);

  /// Rebuilds the participant's series from disk.
  /// Throws Error(unknown_participant) when no log exists.
  ParticipantSeries load_series(const std::string& participant_id) const;

  bool has_participant(const std::string& participant_id) const;
  std::vector<std::string> participant_ids() const;  // sorted

  std::filesystem::path record_path(const std::string& participant_id) const;
  const std::filesystem::path& root() const { return root_; }

  /// Participant ids double as file names: `[A-Za-z0-9][A-Za-z0-9._-]*`,
  /// at most 64 characters. Throws Error(invalid_participant_id).
  static void validate_participant_id(const std::string& participant_id);

private:
  std::mutex& write_lock(const std::string& participant_id);

  std::filesystem::path root_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace mealtrace
