#pragma once

#include <stdexcept>
#include <string>

namespace fedsynth {

/// Invalid input or configuration. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tensor or parameter shapes that do not line up.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A loss or activation left the finite range during training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fedsynth
