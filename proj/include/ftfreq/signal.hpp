#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace ftfreq {

/// One sinusoid A sin(w t + phi).
struct HarmonicSpec {
  double amplitude = 1.0;  // > 0
  double frequency = 1.0;  // rad/s, > 0
  double phase = 0.0;      // rad
};

struct NoDisturbance {};

struct HarmonicDisturbance {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

/// Uniform noise on [-half_range, half_range), held constant for each
/// noise sample period (zero-order hold).
struct UniformDisturbance {
  double half_range = 0.0;
  double sample_period = 1e-3;
  std::uint64_t seed = 0;
};

using DisturbanceSpec = std::variant<NoDisturbance, HarmonicDisturbance, UniformDisturbance>;

/// From `switch_time` on (inclusive), `harmonics` replaces the active set.
struct FrequencySwitch {
  double switch_time = 0.0;
  std::vector<HarmonicSpec> harmonics;
};

struct SignalSpec {
  std::vector<HarmonicSpec> harmonics;
  DisturbanceSpec disturbance = NoDisturbance{};
  std::vector<FrequencySwitch> schedule;
};

struct SampledTrace {
  double sample_period = 0.0;
  double start_time = 0.0;
  std::vector<double> values;

  double time_at(std::size_t k) const { return start_time + static_cast<double>(k) * sample_period; }
};

/// Name of the noise generator, written to run metadata.
inline constexpr const char* kNoiseGenerator = "splitmix64-counter/u53";

/// Throws ConfigError listing every invariant violation of `spec`.
void validate_signal(const SignalSpec& spec);

/// Harmonic set active at time t (post-switch set applies at the switch instant).
const std::vector<HarmonicSpec>& active_harmonics(const SignalSpec& spec, double t);

/// Disturbance value at time t. Deterministic in (spec, t).
double disturbance_at(const DisturbanceSpec& disturbance, double t);

/// Noise-free part plus disturbance at time t >= 0.
double sample_signal(const SignalSpec& spec, double t);

/// values[k] = sample_signal(spec, k * sample_period), k = 0..floor(duration / sample_period).
SampledTrace generate_trace(const SignalSpec& spec, double sample_period, double duration);

/// Uniform draw in [0, 1) from (seed, index); stateless.
double counter_uniform(std::uint64_t seed, std::uint64_t index);

}  // namespace ftfreq
