#pragma once

#include <stdexcept>
#include <string>

namespace stabnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (files, flags, data that fails validation).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the range an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operands do not share graph, support or register layout.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NotUniformlyConnected : public Error {
 public:
  using Error::Error;
};

/// A numerical construction could not reach its requested tolerance.
class ToleranceError : public Error {
 public:
  using Error::Error;
};

}  // namespace stabnet
