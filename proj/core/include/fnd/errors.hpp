#pragma once

#include <stdexcept>
#include <string>

namespace fnd {

// Bad user input: malformed files, invalid flag values, schema violations.
// The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what)
      : std::runtime_error(what) {}
};

// Bad call arguments from code (fractions out of range, shape mismatches).
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Operation invoked on an object in the wrong state (e.g. unfitted space).
class StateError : public std::logic_error {
 public:
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

// Numerical failure during model fitting. The CLI maps these to exit 2.
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace fnd
