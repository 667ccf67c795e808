#pragma once

#include <stdexcept>
#include <string>

namespace fracflow {

/// Invalid scenario data, CLI arguments or file contents. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure: singular or indefinite system, solver breakdown,
/// degenerate cell data. CLI exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fracflow
