#pragma once

#include <stdexcept>
#include <string>

namespace sgcm {

// Root of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid physical parameters (non-positive mass, unnormalized spin amplitudes, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// F = 0: the packets never separate and tau1 is undefined.
class NoSeparationError : public Error {
 public:
  NoSeparationError()
      : Error("force is zero: no spin separation, separation timescale undefined") {}
};

// Argument outside the mathematical domain of an operation (t <= 0 for kernels, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A grid is too coarse for the momenta it must represent.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// A screen extent captures too little probability.
class CoverageError : public Error {
 public:
  CoverageError(const std::string& what, double captured)
      : Error(what), captured_(captured) {}
  double captured() const noexcept { return captured_; }

 private:
  double captured_;
};

// The state has no closed-form Wigner matrix; use the numeric route.
class NotAnalyticError : public Error {
 public:
  using Error::Error;
};

// Malformed key-value configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgcm
