#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stance {

/// Malformed or missing input data (files, records, fields).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A DataError tied to a specific line of an input file.
class LineError : public DataError {
 public:
  LineError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised when numerical training or checking diverges (non-finite values).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stance
