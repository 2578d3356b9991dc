#pragma once

#include <stdexcept>
#include <string>

namespace trailrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or contract-violating input (bad CSV rows, reserved tokens,
/// unknown locations, invalid parameters).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The exact solver was asked to enumerate more orderings than its budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace trailrec
