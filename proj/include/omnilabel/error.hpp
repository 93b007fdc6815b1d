#pragma once

#include <stdexcept>
#include <string>

namespace omnilabel {

// Malformed or out-of-contract input data. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes that do not line up (G > K, row/box count mismatch, vector lengths).
class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace omnilabel
