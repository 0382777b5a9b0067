#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rulelab {

/// Base class for all rulelab errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, specs, or rule structure. CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed file or byte-stream content. Carries the byte offset of the
/// first offending byte.
class FormatError : public ValidationError {
 public:
  FormatError(const std::string& msg, std::uint64_t offset)
      : ValidationError(msg + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Syntax error in textual input (rule DSL, config files).
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& msg, std::uint64_t line, std::uint64_t column)
      : ValidationError("line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::uint64_t line() const { return line_; }
  std::uint64_t column() const { return column_; }

 private:
  std::uint64_t line_;
  std::uint64_t column_;
};

/// Filesystem / stream failures. CLI exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rulelab
