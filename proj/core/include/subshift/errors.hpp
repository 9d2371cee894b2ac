#pragma once

#include <stdexcept>
#include <string>

namespace subshift {

// Bad argument to an operation (violated precondition that is the caller's fault).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index or window reaches past the loaded sequence prefix. Never silently truncated.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A requested allocation or enumeration exceeds the configured budget.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Schedule or run configuration is inconsistent.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation called on an object in the wrong state (e.g. sampling an empty family).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Persisted artifacts fail their hash chain.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subshift
