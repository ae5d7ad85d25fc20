#include "ftfreq/errors.hpp"

#include <sstream>

namespace ftfreq {

std::string format_violations(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i != 0) os << '\n';
    os << v.field << ": " << v.constraint << " (got " << v.value << ")";
  }
  return os.str();
}

ConfigError::ConfigError(std::vector<Violation> violations)
    : std::runtime_error(format_violations(violations)), violations_(std::move(violations)) {}

}  // namespace ftfreq
