#pragma once

#include <stdexcept>
#include <string>

namespace oscfrac {

// Bad user input: malformed phase, out-of-range parameters, violated
// preconditions. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical budget (panel count, refinement points, raster rows) would be
// exceeded. The CLI maps this to exit code 3.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure did not reach its requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oscfrac
