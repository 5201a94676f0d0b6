#pragma once

#include <stdexcept>
#include <string>

namespace weylprior {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter point outside (or too close to the boundary of) a chart domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Factorization failure, non-finite quadrature output and the like.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The Weyl 1-form is not closed, so no potential and no Ω-based prior exists.
class ExistenceError : public Error {
 public:
  using Error::Error;
};

// Unknown model id, bad grid or flag value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace weylprior
