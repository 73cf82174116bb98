#pragma once

#include <stdexcept>
#include <string>

namespace kdv {

/// Bad input: violated precondition, malformed config or file.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: blowup, non-convergence, step-size underflow.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kdv
