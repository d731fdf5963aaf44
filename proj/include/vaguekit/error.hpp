#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vaguekit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs that do not fit together (mismatched state spaces, length mismatch,
/// dimension mismatch, unknown column).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A value outside the domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyReport : public Error {
 public:
  using Error::Error;
};

/// Refused exhaustive enumeration over a state space larger than the cap.
class CapExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Alternating projections did not reach tolerance within the iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  /// Max absolute change after each sweep.
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& what, std::vector<std::string> dependent)
      : Error(what), dependent_(std::move(dependent)) {}
  const std::vector<std::string>& dependent_columns() const noexcept { return dependent_; }

 private:
  std::vector<std::string> dependent_;
};

}  // namespace vaguekit
