#pragma once

#include <stdexcept>
#include <string>

namespace sentilag {

/// Base exception for every recoverable failure reported by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file content that violates its declared schema.
class FormatError : public Error {
 public:
  FormatError(const std::string& source, long line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

/// Numerical routine called outside its domain (constant series, empty input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace sentilag
