#pragma once

#include <stdexcept>
#include <string>

namespace qtsp {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed TSPLIB header or numeric field.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Data that is well-formed but inconsistent (dimension mismatch, wrong
// vector length, empty problem).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// TSPLIB feature that is recognized but not implemented.
class UnsupportedFeature : public Error {
 public:
  using Error::Error;
};

// A city sequence that is not a valid tour.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An enumeration or simulation bound was exceeded.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtsp
