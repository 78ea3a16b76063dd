#pragma once

#include <stdexcept>
#include <string>

namespace rpcc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument is outside the operation's domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A composite input (mixture spec, config) violates one or more invariants.
/// The message lists every violated field.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `row()` is 1-based, 0 when not row specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(row > 0 ? "row " + std::to_string(row) + ": " + what : what),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rpcc
