#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftfreq {

/// Caller violated an operation precondition (bad index, bad size, ...).
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// One failed configuration constraint.
struct Violation {
  std::string field;
  std::string constraint;
  std::string value;
};

/// Configuration rejected; carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<Violation> violations);
  explicit ConfigError(const std::string& field, const std::string& constraint,
                       const std::string& value)
      : ConfigError(std::vector<Violation>{{field, constraint, value}}) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
  std::vector<Violation> violations_;
};

/// Non-finite data or solver failure inside the estimation pipeline.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what, std::ptrdiff_t sample_index = -1)
      : std::runtime_error(what), sample_index_(sample_index) {}

  /// Index of the sample being processed, or -1 outside a run.
  std::ptrdiff_t sample_index() const noexcept { return sample_index_; }

private:
  std::ptrdiff_t sample_index_;
};

/// Estimated polynomial has roots that are not (numerically) real.
class NotPhysicalError : public NumericError {
public:
  NotPhysicalError(const std::string& what, std::vector<std::complex<double>> roots)
      : NumericError(what), roots_(std::move(roots)) {}

  const std::vector<std::complex<double>>& roots() const noexcept { return roots_; }

private:
  std::vector<std::complex<double>> roots_;
};

std::string format_violations(const std::vector<Violation>& violations);

}  // namespace ftfreq
