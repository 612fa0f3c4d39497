#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace grl {

using NodeId = std::uint32_t;
using Distance = std::uint16_t;

inline constexpr Distance kUnreachable = std::numeric_limits<Distance>::max();

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, labels, graphs).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Text input that cannot be parsed; carries the offending line.
class ParseError : public DataError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : DataError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Training or evaluation produced non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or arguments.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace grl
