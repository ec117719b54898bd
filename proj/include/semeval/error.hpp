#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semeval {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 1 and prints `category()` as the machine-readable tag.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* category() const noexcept { return "error"; }
};

/// Malformed input file. `line()` is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& detail)
      : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + detail),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* category() const noexcept override { return "parse_error"; }

 private:
  std::size_t line_;
};

/// Inputs violate a documented precondition (duplicate ids, shape mismatch...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "invalid_argument"; }
};

/// NaN/Inf, asymmetric or indefinite matrices.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "numerical_error"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "io_error"; }
};

/// Embedding service failures (connection, status, protocol).
class ServiceError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "service_error"; }
};

}  // namespace semeval
