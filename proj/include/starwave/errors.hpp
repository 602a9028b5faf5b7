#pragma once

#include <stdexcept>
#include <string>

namespace starwave {

/// A numerical procedure failed (non-convergence, guard violation,
/// state leaving the admissible neighbourhood).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace starwave
