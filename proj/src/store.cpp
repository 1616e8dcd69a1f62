/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "mealtrace/csvio.hpp"
#include "mealtrace/error.hpp"

namespace mealtrace {

namespace {

constexpr const char* kExtension = ".jsonl";

bool id_char_ok(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
}

}  // namespace

void SampleLog::validate_participant_id(const std::string& participant_id) {
  const bool ok =
      !participant_id.empty() && participant_id.size() <= 64 &&
      std::isalnum(static_cast<unsigned char>(participant_id.front())) &&
      std::all_of(participant_id.begin(), participant_id.end(), id_char_ok);
  if (!ok) {
    fail(ErrorCode::invalid_participant_id,
         "participant id must match [A-Za-z0-9][A-Za-z0-9._-]{0,63}");
  }
}

SampleLog::SampleLog(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    fail(ErrorCode::storage_failure, "cannot create data dir " + root_.string());
  }
}

std::filesystem::path SampleLog::record_path(const std::string& participant_id) const {
  return root_ / (participant_id + kExtension);
}

bool SampleLog::has_participant(const std::string& participant_id) const {
  validate_participant_id(participant_id);
  return std::filesystem::exists(record_path(participant_id));
}

std::vector<std::string> SampleLog::participant_ids() const {
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (!name.ends_with(kExtension)) continue;
    ids.push_back(name.substr(0, name.size() - std::string(kExtension).size()));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::mutex& SampleLog::write_lock(const std::string& participant_id) {
  std::lock_guard<std::mutex> guard(registry_mutex_);
  auto& slot = locks_[participant_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

ParticipantSeries SampleLog::load_series(const std::string& participant_id) const {
  validate_participant_id(participant_id);
  const auto path = record_path(participant_id);
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::unknown_participant, "no samples stored for " + participant_id);
  }
  auto records = read_samples_jsonl(in, path.string());
  std::vector<GlucoseSample> samples;
  samples.reserve(records.size());
  for (auto& r : records) samples.push_back(r.sample);
  return build_series(participant_id, std::move(samples));
}

SampleLog::AppendResult SampleLog::append_samples(const std::string& participant_id,
                                                  std::span<const GlucoseSample> samples) {
  validate_participant_id(participant_id);
  for (const GlucoseSample& s : samples) {
    if (!std::isfinite(s.glucose_mmol_l) || s.glucose_mmol_l <= 0.0) {
      fail(ErrorCode::non_positive_value,
           "glucose value must be finite and > 0 at " + s.timestamp.to_rfc3339());
    }
  }

  std::lock_guard<std::mutex> guard(write_lock(participant_id));

  // Snapshot what is already stored. Offsets must stay uniform per
  // participant or later hour-of-day binning would be ambiguous.
  std::map<std::int64_t, double> stored;
  bool have_offset = false;
  std::int32_t offset = 0;
  const auto path = record_path(participant_id);
  {
    std::ifstream in(path);
    if (in) {
      for (const auto& r : read_samples_jsonl(in, path.string())) {
        stored[r.sample.timestamp.epoch_seconds()] = r.sample.glucose_mmol_l;
        offset = r.sample.timestamp.utc_offset_seconds();
        have_offset = true;
      }
    }
  }

  AppendResult result;
  std::string payload;
  std::map<std::int64_t, double> pending;
  for (const GlucoseSample& s : samples) {
    if (have_offset && s.timestamp.utc_offset_seconds() != offset) {
      fail(ErrorCode::mixed_offsets,
           "batch offset differs from the participant's stored offset");
    }
    offset = s.timestamp.utc_offset_seconds();
    have_offset = true;

    const std::int64_t key = s.timestamp.epoch_seconds();
    auto it = stored.find(key);
    const auto pending_it = it == stored.end() ? pending.find(key) : pending.end();
    const bool in_pending = it == stored.end() && pending_it != pending.end();
    if (it != stored.end() || in_pending) {
      const double existing = in_pending ? pending_it->second : it->second;
      if (existing != s.glucose_mmol_l) {
        fail(ErrorCode::conflicting_duplicate,
             "conflicting value for " + participant_id + " at " +
                 s.timestamp.to_rfc3339());
      }
      result.duplicates += 1;
      continue;
    }

    pending.emplace(key, s.glucose_mmol_l);
    payload += sample_record_json(participant_id, s);
    payload += '\n';
    result.accepted += 1;
    if (s.implausible()) result.implausible += 1;
  }

  if (payload.empty()) return result;

  // Single write + fsync keeps the batch all-or-nothing across restarts.
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) fail(ErrorCode::storage_failure, "cannot open " + path.string());
  const char* data = payload.data();
  std::size_t remaining = payload.size();
  while (remaining > 0) {
    ssize_t n = ::write(fd, data, remaining);
    if (n < 0) {
      ::close(fd);
      fail(ErrorCode::storage_failure, "write failed for " + path.string());
    }
    data += n;
    remaining -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    fail(ErrorCode::storage_failure, "fsync failed for " + path.string());
  }
  ::close(fd);
  return result;
}

}  // namespace mealtrace
