#pragma once

#include <stdexcept>
#include <string>

namespace depthdist {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument value (non-positive counts, p < 1, bad box, ...).
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error("ParameterError: " + what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error("DimensionMismatch: " + what) {}
};

/// A support function was requested over an empty index set.
class EmptyRegion : public Error {
 public:
  explicit EmptyRegion(const std::string& what) : Error("EmptyRegion: " + what) {}
};

/// The trimming level is not below the deepest level shared by both samples.
class LevelRangeError : public Error {
 public:
  explicit LevelRangeError(const std::string& what) : Error("LevelRangeError: " + what) {}
};

class DegenerateBaseline : public Error {
 public:
  explicit DegenerateBaseline(const std::string& what) : Error("DegenerateBaseline: " + what) {}
};

/// Malformed cloud file. Line and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    std::string msg = "ParseError: " + what;
    if (line > 0) {
      msg += " (line " + std::to_string(line);
      if (column > 0) msg += ", column " + std::to_string(column);
      msg += ")";
    }
    return msg;
  }

  std::size_t line_;
  std::size_t column_;
};

class RaggedRowError : public ParseError {
 public:
  RaggedRowError(std::size_t line, std::size_t expected, std::size_t got)
      : ParseError("ragged row: expected " + std::to_string(expected) + " fields, got " +
                       std::to_string(got),
                   line) {}
};

class NonFiniteValue : public ParseError {
 public:
  NonFiniteValue(std::size_t line, std::size_t column)
      : ParseError("non-finite value", line, column) {}
};

}  // namespace depthdist
