/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <stdexcept>
#include <string>

namespace mealtrace {

enum class ErrorCode {
  parse_error,
  non_positive_value,
  mixed_offsets,
  conflicting_duplicate,
  invalid_spec,
  empty_input,
  insufficient_data,
  no_candidates,
  invalid_profile,
  invalid_participant_id,
  unknown_participant,
  storage_failure,
  bind_failure,
};

/// Stable machine-readable name, used verbatim in HTTP error bodies.
constexpr const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::non_positive_value: return "non_positive_value";
    case ErrorCode::mixed_offsets: return "mixed_offsets";
    case ErrorCode::conflicting_duplicate: return "conflicting_duplicate";
    case ErrorCode::invalid_spec: return "invalid_spec";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::no_candidates: return "no_candidates";
    case ErrorCode::invalid_profile: return "invalid_profile";
    case ErrorCode::invalid_participant_id: return "invalid_participant_id";
    case ErrorCode::unknown_participant: return "unknown_participant";
    case ErrorCode::storage_failure: return "storage_failure";
    case ErrorCode::bind_failure: return "bind_failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mealtrace
