#pragma once

#include <stdexcept>
#include <string>

namespace bnnv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (model, property, DIMACS, graph files).
class ParseError : public Error {
public:
  using Error::Error;
};

/// Structural mismatch: wrong matrix shape, weight outside {-1,+1},
/// vector of the wrong length, index out of range.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Exponential oracles refuse instances above their size guard.
class InstanceTooLarge : public Error {
public:
  using Error::Error;
};

/// SAT backend could not be launched or produced garbage.
class BackendError : public Error {
public:
  using Error::Error;
};

} // namespace bnnv
