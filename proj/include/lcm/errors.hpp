#pragma once

#include <stdexcept>
#include <string>

namespace lcm {

// Bad inputs: invalid parameters, dimension mismatches, rank-deficient designs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failures during a run that are not attributable to the inputs.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lcm
