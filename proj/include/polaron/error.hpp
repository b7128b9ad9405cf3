#pragma once

#include <stdexcept>
#include <string>

namespace polaron {

// Base class for every failure raised by the library. The CLI maps the
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class UnsupportedN : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Raised when an iteration hits its cap; `residual` and `iterations`
/// describe where it stopped.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual, long iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

/// Critical-ratio bisection could not bracket the transition.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public InvalidArgument {
 public:
  ParseError(const std::string& what, int line)
      : InvalidArgument("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ValidationError : public InvalidArgument {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : InvalidArgument(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace polaron
