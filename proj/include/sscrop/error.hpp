#pragma once

#include <stdexcept>
#include <string>

namespace sscrop {

// Base for all library failures. The CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor or sample shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid argument values, labels, or task requests.
class ValueError : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File system and parse failures on data files.
class IoError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf or another numerical breakdown during computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace sscrop
