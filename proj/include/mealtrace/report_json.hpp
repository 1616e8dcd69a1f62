/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mealtrace/audit.hpp"
#include "mealtrace/detector.hpp"
#include "mealtrace/error.hpp"
#include "mealtrace/synthgen.hpp"

namespace mealtrace {

// Canonical JSON documents (see docs/schema.md). The CLI and the HTTP
// service share these serializers, which is what makes their outputs
// byte-identical: nlohmann::json orders keys alphabetically and renders
// doubles with shortest round-trip precision. Every *_document() string
// ends with a single newline.

nlohmann::json analysis_to_json(const std::string& participant_id, const Analysis& analysis);
std::string analysis_document(const std::string& participant_id, const Analysis& analysis);

nlohmann::json completeness_to_json(const CompletenessReport& report);
std::string completeness_document(const CompletenessReport& report);

nlohmann::json events_to_json(const std::vector<MealEvent>& events);
std::string events_document(const std::vector<MealEvent>& events);

std::string error_document(ErrorCode code, const std::string& message);

/// Loads a synthetic-generator profile (schema in docs/schema.md).
/// Throws Error(invalid_profile) on missing or ill-typed fields.
synth::SynthProfile profile_from_json(const nlohmann::json& doc);
synth::SynthProfile load_profile(const std::string& path);

/// `truth` artifact: JSON list of RFC3339 onset instants.
std::string truth_document(const std::vector<OffsetTime>& onsets);

}  // namespace mealtrace
