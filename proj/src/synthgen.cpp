/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mealtrace/error.hpp"

namespace mealtrace::synth {

namespace {

constexpr double kGlucoseFloor = 0.1;  // keeps the positivity invariant under noise

// Seedable source with a fully documented draw sequence (see header).
class PinnedRng {
public:
  explicit PinnedRng(std::uint64_t seed) : engine_(seed) {}

  double next_unit() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double next_gaussian() {
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

double meal_response(double dt_s, const MealSpec& meal) {
  if (dt_s < 0.0) return 0.0;
  const double rise_s = static_cast<double>(meal.rise_duration.count());
  if (dt_s <= rise_s) return meal.rise * dt_s / rise_s;
  const double halflife_s = static_cast<double>(meal.decay_halflife.count());
  return meal.rise * std::exp2(-(dt_s - rise_s) / halflife_s);
}

void validate(const SynthProfile& p) {
  auto reject = [](const std::string& what) {
    fail(ErrorCode::invalid_profile, "invalid profile: " + what);
  };
  if (p.participant_id.empty()) reject("participant_id must be non-empty");
  if (!(p.baseline > 0.0)) reject("baseline must be > 0");
  if (p.days < 1) reject("days must be >= 1");
  if (p.period.count() <= 0) reject("period must be > 0");
  if (p.noise_sd < 0.0) reject("noise_sd must be >= 0");
  for (const MealSpec& m : p.meals) {
    if (m.clock_time.count() < 0 || m.clock_time.count() >= 86400) {
      reject("meal clock_time must lie within one day");
    }
    if (!(m.rise > 0.0)) reject("meal rise must be > 0");
    if (m.rise_duration.count() <= 0) reject("meal rise_duration must be > 0");
    if (m.decay_halflife.count() <= 0) reject("meal decay_halflife must be > 0");
  }
  if (p.dropout.uniform_rate < 0.0 || p.dropout.uniform_rate >= 1.0) {
    reject("dropout uniform_rate must be in [0, 1)");
  }
  for (const BlockGap& g : p.dropout.block_gaps) {
    if (g.start.count() < 0 || g.duration.count() < 0) {
      reject("block gaps must have non-negative start and duration");
    }
  }
}

}  // namespace

SynthResult generate(const SynthProfile& profile) {
  validate(profile);

  const std::int64_t start_local =
      days_from_civil(profile.start_date.year, profile.start_date.month,
                      profile.start_date.day) * 86400;
  const OffsetTime start(start_local - profile.utc_offset_seconds,
                         profile.utc_offset_seconds);

  struct Onset {
    OffsetTime at;
    const MealSpec* meal;
  };
  std::vector<Onset> onsets;
  for (int day = 0; day < profile.days; ++day) {
    for (const MealSpec& meal : profile.meals) {
      onsets.push_back(Onset{start + std::chrono::seconds(
                                          static_cast<std::int64_t>(day) * 86400 +
                                          meal.clock_time.count()),
                             &meal});
    }
  }
  std::sort(onsets.begin(), onsets.end(),
            [](const Onset& a, const Onset& b) { return a.at < b.at; });

  const std::int64_t ticks =
      static_cast<std::int64_t>(profile.days) * 86400 / profile.period.count();

  PinnedRng rng(profile.seed);
  std::vector<GlucoseSample> samples;
  samples.reserve(static_cast<std::size_t>(ticks));

  for (std::int64_t k = 0; k < ticks; ++k) {
    const OffsetTime t = start + std::chrono::seconds(k * profile.period.count());
    const std::chrono::seconds t_rel(k * profile.period.count());

    double value = profile.baseline;
    for (const Onset& onset : onsets) {
      if (t < onset.at) break;
      value += meal_response(static_cast<double>((t - onset.at).count()), *onset.meal);
    }

    const double z = rng.next_gaussian();
    const double u = rng.next_unit();

    value = std::max(value + z * profile.noise_sd, kGlucoseFloor);

    if (u < profile.dropout.uniform_rate) continue;
    bool in_gap = false;
    for (const BlockGap& g : profile.dropout.block_gaps) {
      if (t_rel >= g.start && t_rel < g.start + g.duration) {
        in_gap = true;
        break;
      }
    }
    if (in_gap) continue;

    samples.push_back(GlucoseSample{t, value});
  }

  SynthResult result;
  result.series = build_series(profile.participant_id, std::move(samples));
  result.truth.reserve(onsets.size());
  for (const Onset& onset : onsets) result.truth.push_back(onset.at);
  return result;
}

}  // namespace mealtrace::synth
