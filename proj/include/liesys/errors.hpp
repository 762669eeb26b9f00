#pragma once

#include <stdexcept>
#include <string>

namespace liesys {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A group element or algebra element violates the chart of its model.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied argument is out of range (control outside U, order < 1, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// The model itself is inconsistent (f_0 not an automorphism, bad structure constants).
class ModelError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure broke down (singular Jacobian, eigensolver failure).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed its size guard.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace liesys
