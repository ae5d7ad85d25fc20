#include "ftfreq/signal.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ftfreq/errors.hpp"

namespace ftfreq {
namespace {

std::string str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_harmonics(const std::vector<HarmonicSpec>& hs, const std::string& field,
                     std::vector<Violation>& out) {
  if (hs.empty()) out.push_back({field, "at least one harmonic required", "0"});
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const auto& h = hs[i];
    const auto name = field + "[" + std::to_string(i) + "]";
    if (!(h.amplitude > 0.0) || !std::isfinite(h.amplitude))
      out.push_back({name + ".amplitude", "must be finite and > 0", str(h.amplitude)});
    if (!(h.frequency > 0.0) || !std::isfinite(h.frequency))
      out.push_back({name + ".frequency", "must be finite and > 0", str(h.frequency)});
    if (!std::isfinite(h.phase)) out.push_back({name + ".phase", "must be finite", str(h.phase)});
    for (std::size_t j = 0; j < i; ++j)
      if (hs[j].frequency == h.frequency)
        out.push_back({name + ".frequency", "frequencies must be pairwise distinct", str(h.frequency)});
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

void validate_signal(const SignalSpec& spec) {
  std::vector<Violation> v;
  check_harmonics(spec.harmonics, "signal.harmonics", v);
  double last = -INFINITY;
  for (std::size_t i = 0; i < spec.schedule.size(); ++i) {
    const auto& sw = spec.schedule[i];
    const auto name = "signal.switch" + std::to_string(i + 1);
    if (!(sw.switch_time > last) || !std::isfinite(sw.switch_time))
      v.push_back({name + ".time", "switch times must be finite and strictly increasing", str(sw.switch_time)});
    last = sw.switch_time;
    check_harmonics(sw.harmonics, name + ".harmonics", v);
  }
  if (const auto* u = std::get_if<UniformDisturbance>(&spec.disturbance)) {
    if (!(u->half_range > 0.0) || !std::isfinite(u->half_range))
      v.push_back({"signal.disturbance.half_range", "must be finite and > 0", str(u->half_range)});
    if (!(u->sample_period > 0.0) || !std::isfinite(u->sample_period))
      v.push_back({"signal.disturbance.sample_period", "must be finite and > 0", str(u->sample_period)});
  } else if (const auto* h = std::get_if<HarmonicDisturbance>(&spec.disturbance)) {
    if (!std::isfinite(h->amplitude) || !std::isfinite(h->frequency) || !std::isfinite(h->phase))
      v.push_back({"signal.disturbance", "harmonic disturbance parameters must be finite", "non-finite"});
  }
  if (!v.empty()) throw ConfigError(std::move(v));
}

const std::vector<HarmonicSpec>& active_harmonics(const SignalSpec& spec, double t) {
  const std::vector<HarmonicSpec>* active = &spec.harmonics;
  for (const auto& sw : spec.schedule) {
    if (t >= sw.switch_time)
      active = &sw.harmonics;
    else
      break;
  }
  return *active;
}

double counter_uniform(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t bits = splitmix64(splitmix64(seed) ^ index);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double disturbance_at(const DisturbanceSpec& disturbance, double t) {
  return std::visit(
      [t](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, NoDisturbance>) {
          return 0.0;
        } else if constexpr (std::is_same_v<D, HarmonicDisturbance>) {
          return d.amplitude * std::sin(d.frequency * t + d.phase);
        } else {
          // Grid times k*Ts may land a hair below the noise instant; nudge before flooring.
          const double slot = std::floor(t / d.sample_period + 1e-9);
          const auto index = static_cast<std::uint64_t>(slot < 0.0 ? 0.0 : slot);
          return d.half_range * (2.0 * counter_uniform(d.seed, index) - 1.0);
        }
      },
      disturbance);
}

double sample_signal(const SignalSpec& spec, double t) {
  double y = 0.0;
  for (const auto& h : active_harmonics(spec, t)) y += h.amplitude * std::sin(h.frequency * t + h.phase);
  return y + disturbance_at(spec.disturbance, t);
}

SampledTrace generate_trace(const SignalSpec& spec, double sample_period, double duration) {
  std::vector<Violation> v;
  if (!(sample_period > 0.0) || !std::isfinite(sample_period))
    v.push_back({"sample_period", "must be finite and > 0", str(sample_period)});
  if (!(duration >= 0.0) || !std::isfinite(duration))
    v.push_back({"duration", "must be finite and >= 0", str(duration)});
  if (!v.empty()) throw ConfigError(std::move(v));
  validate_signal(spec);

  const auto count = static_cast<std::size_t>(std::floor(duration / sample_period + 1e-9)) + 1;
  SampledTrace trace;
  trace.sample_period = sample_period;
  trace.values.reserve(count);
  for (std::size_t k = 0; k < count; ++k) trace.values.push_back(sample_signal(spec, trace.time_at(k)));
  return trace;
}

}  // namespace ftfreq
