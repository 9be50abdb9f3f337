#pragma once

#include <stdexcept>
#include <string>

namespace artic {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (PLY, USDA, JSON sidecars). Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column = 0)
      : Error(format(message, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + message;
  }

  int line_;
  int column_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  RangeError(const std::string& message, double value, double lower, double upper)
      : Error(message), value_(value), lower_(lower), upper_(upper) {}

  double value() const noexcept { return value_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double value_;
  double lower_;
  double upper_;
};

class PlacementError : public Error {
 public:
  using Error::Error;
};

}  // namespace artic
