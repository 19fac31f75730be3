#pragma once

#include <stdexcept>
#include <string>

namespace nat2 {

/// Malformed or out-of-contract input (bad dimensions, unparsable files,
/// violated preconditions). Maps to CLI exit code 2.
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure during an otherwise well-formed computation
/// (singular regression block, degenerate residual variance,
/// non-positive-definite matrix). Maps to CLI exit code 3.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nat2
