#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace volterra {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; offset is the byte position of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnboundVariableError : public Error {
 public:
  using Error::Error;
};

/// log of a non-positive value, 0 to a negative power, division by zero, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& message, double abscissa)
      : Error(message), abscissa_(abscissa) {}
  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& message, std::size_t pivot_step)
      : Error(message), pivot_step_(pivot_step) {}
  std::size_t pivot_step() const noexcept { return pivot_step_; }

 private:
  std::size_t pivot_step_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace volterra
