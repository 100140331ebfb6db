#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynppr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed edge-list, score or batch text.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Request the algorithms deliberately do not handle (e.g. deleting the source).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Operation called on a problem outside its domain (e.g. TrackingPPR with node changes).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Epsilon calibration could not bracket or converge.
class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, std::string trace)
      : Error(what), trace_(std::move(trace)) {}

  const std::string& trace() const noexcept { return trace_; }

 private:
  std::string trace_;
};

}  // namespace dynppr
