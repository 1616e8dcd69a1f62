/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "mealtrace/series.hpp"

namespace mealtrace::synth {

/// One scheduled meal: glucose rises linearly from 0 to `rise` over
/// rise_duration, then decays exponentially with the given half-life.
struct MealSpec {
  std::chrono::seconds clock_time{8 * 3600};  // local time of onset
  double rise = 4.0;                          // mmol/L, > 0
  std::chrono::seconds rise_duration{30 * 60};
  std::chrono::seconds decay_halflife{60 * 60};
};

struct BlockGap {
  std::chrono::seconds start{0};     // relative to the series start
  std::chrono::seconds duration{0};  // samples inside [start, start+duration) are dropped
};

struct Dropout {
  double uniform_rate = 0.0;  // per-sample drop probability, [0, 1)
  std::vector<BlockGap> block_gaps;
};

struct SynthProfile {
  std::string participant_id = "synth";
  double baseline = 6.0;  // mmol/L
  std::vector<MealSpec> meals;
  double noise_sd = 0.0;  // mmol/L
  int days = 1;
  std::chrono::seconds period{300};
  std::int32_t utc_offset_seconds = 0;
  LocalDate start_date{2024, 1, 1};  // series starts at local midnight
  std::uint64_t seed = 0;
  Dropout dropout;
};

struct SynthResult {
  ParticipantSeries series;
  std::vector<OffsetTime> truth;  // every meal onset instant, ascending
};

/// Deterministic synthetic CGM trace with a known meal schedule.
///
/// value(t) = baseline + sum of meal responses + gaussian(0, noise_sd),
/// floored at 0.1 mmol/L so the series always satisfies the positivity
/// invariant.
///
/// Randomness is pinned so identical seeds give bit-identical output:
/// a mersenne_twister_engine (std::mt19937_64) drives a 53-bit uniform
/// u = (x >> 11) * 2^-53, the gaussian is Box-Muller
/// z = sqrt(-2 ln u1) * cos(2 pi u2), and each sample tick consumes, in
/// order, one gaussian (two uniforms) then one dropout uniform, whether or
/// not the sample survives.
///
/// Throws Error(invalid_profile) on out-of-range parameters.
SynthResult generate(const SynthProfile& profile);

}  // namespace mealtrace::synth
