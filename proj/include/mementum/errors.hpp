#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mementum {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `row` is the 1-based line number in the file.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its mathematical domain (state index, dimensions, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Failure of a numerical step; carries the time index where it happened.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::ptrdiff_t t)
      : Error(what + " at t=" + std::to_string(t)), t_(t) {}
  std::ptrdiff_t time_index() const noexcept { return t_; }

 private:
  std::ptrdiff_t t_;
};

}  // namespace mementum
