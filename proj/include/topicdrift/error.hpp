#pragma once

#include <stdexcept>
#include <string>

namespace topicdrift {

/// Input violates a documented precondition. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A persisted artifact was written by an incompatible format version.
class FormatVersionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace topicdrift
