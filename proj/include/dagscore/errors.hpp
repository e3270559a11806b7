#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dagscore {

/// Base for every error raised by the library. CLI maps subclasses of
/// ValidationError to exit status 1 and IoError to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a special function.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A matrix required to be symmetric positive definite failed Cholesky.
class NotSpdError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Design matrix lacks full column rank. `columns()` lists the offending
/// design columns (0 = intercept, k = k-th predictor).
class RankDeficientError : public ValidationError {
 public:
  RankDeficientError(const std::string& what, std::vector<int> columns)
      : ValidationError(what), columns_(std::move(columns)) {}
  const std::vector<int>& columns() const { return columns_; }

 private:
  std::vector<int> columns_;
};

/// A prior (or fractional prior) would be improper at the given sizes.
class ProprietyError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class CycleError : public ValidationError {
 public:
  CycleError(const std::string& what, std::vector<int> cycle)
      : ValidationError(what), cycle_(std::move(cycle)) {}
  /// Closed vertex sequence (first == last), 0-based.
  const std::vector<int>& cycle() const { return cycle_; }

 private:
  std::vector<int> cycle_;
};

class NonChordalError : public ValidationError {
 public:
  NonChordalError(const std::string& what, std::vector<int> cycle)
      : ValidationError(what), cycle_(std::move(cycle)) {}
  /// Chordless cycle of length >= 4, 0-based, not repeated at the end.
  const std::vector<int>& cycle() const { return cycle_; }

 private:
  std::vector<int> cycle_;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line)
      : ValidationError(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace dagscore
