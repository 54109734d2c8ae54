#pragma once

#include <stdexcept>
#include <string>

namespace semimed {

// Input data failed a structural invariant (bad CSV row, empty arm, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A confidence interval was requested from a variance formula that is only
// a partial (lower-bound) estimate.
struct PartialVarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace semimed
