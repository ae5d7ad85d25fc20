#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ftfreq/errors.hpp"

namespace ftfreq {

/// Fixed-capacity sample history on a uniform grid.
///
/// tap(k) is the value pushed k pushes ago; taps reaching before the first
/// push read as zero, which is exactly the delay operator's "0 for t < h" branch.
template <typename Scalar = double>
class TappedDelayLine {
public:
  TappedDelayLine() : TappedDelayLine(0) {}

  /// `capacity` is the deepest tap that may be requested.
  explicit TappedDelayLine(std::size_t capacity) : ring_(capacity + 1, Scalar(0)) {}

  void push(Scalar sample) {
    head_ = (head_ + 1) % ring_.size();
    ring_[head_] = sample;
    ++count_;
  }

  Scalar tap(std::size_t steps) const {
    if (steps > capacity())
      throw UsageError("tap(" + std::to_string(steps) + ") exceeds delay line capacity " +
                       std::to_string(capacity()));
    if (steps >= count_) return Scalar(0);
    return ring_[(head_ + ring_.size() - steps) % ring_.size()];
  }

  Scalar operator[](std::size_t steps) const { return tap(steps); }

  std::size_t capacity() const noexcept { return ring_.size() - 1; }
  std::size_t count() const noexcept { return count_; }

  void clear() {
    std::fill(ring_.begin(), ring_.end(), Scalar(0));
    head_ = 0;
    count_ = 0;
  }

private:
  std::vector<Scalar> ring_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
};

/// Converts a delay in seconds to a whole number of samples.
/// Returns false when `delay` is not an integer multiple of `sample_period`.
inline bool delay_in_samples(double delay, double sample_period, std::size_t& steps) {
  if (!(delay > 0.0) || !(sample_period > 0.0) || !std::isfinite(delay / sample_period)) return false;
  const double ratio = delay / sample_period;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0) return false;
  steps = static_cast<std::size_t>(rounded);
  return true;
}

}  // namespace ftfreq
