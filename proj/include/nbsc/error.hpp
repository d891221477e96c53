#pragma once

#include <stdexcept>
#include <string>

namespace nbsc {

/// Malformed input: bad edge lists, invalid parameters, dimension mismatch.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative kernel failed to converge or a residual check failed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nbsc
