#pragma once

#include <stdexcept>
#include <string>

namespace multibump {

/// A user-supplied parameter violates a precondition. The message names the
/// violated constraint.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its stated accuracy (non-convergent
/// bracket, iteration cap, singular system, divergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A verified property does not hold on the computed data.
class AssertionFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace multibump
