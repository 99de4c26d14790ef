#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ocsrbench {

/// Base of every recoverable error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition (e.g. passed an invalid graph).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed text input. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : Error(format(message, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    return message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
  }

  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that violates a schema rule; `path` points at the offending node.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& message, std::string path)
      : Error(path.empty() ? message : message + " at " + path), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

/// An operation declined to run (size guard, inexpressible content, ...).
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// A statistic was requested over a population for which it is not defined (e.g. empty).
class UndefinedStatisticError : public Error {
 public:
  using Error::Error;
};

}  // namespace ocsrbench
