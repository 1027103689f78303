#pragma once

#include <stdexcept>
#include <string>

namespace sfmg {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// Input matrix does not have the rank an algorithm requires.
class DegenerateInputError : public Error {
 public:
  DegenerateInputError(const std::string& what, long column)
      : Error(what), column_(column) {}
  long column() const { return column_; }

 private:
  long column_;
};

// Principal matrix logarithm undefined (eigenvalue on or near -1).
class BranchCutError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line) : Error(what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sfmg
