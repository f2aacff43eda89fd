#pragma once

#include <stdexcept>
#include <string>

namespace bfi {

/// Raised when an input violates an operation's preconditions (bad
/// parameters, unsupported dimension, divergent PL constant, ...).
/// The CLI maps it to exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation fails numerically (non-finite values,
/// underflow, coarse grids, blow-up). The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace bfi
