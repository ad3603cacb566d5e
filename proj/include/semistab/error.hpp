#pragma once

#include <stdexcept>
#include <string>

namespace semistab {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression or problem document. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = 0, std::string field = {})
      : Error(format(message, line, field)), line_(line), field_(std::move(field)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& message, int line, const std::string& field) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "field '" + field + "': ";
    return out + message;
  }

  int line_;
  std::string field_;
};

/// A trajectory left the domain (or blew up) before the requested time.
class DomainExit : public Error {
 public:
  DomainExit(double exit_time, bool blowup)
      : Error(std::string(blowup ? "trajectory blew up" : "trajectory left the domain") +
              " at t=" + std::to_string(exit_time)),
        exit_time_(exit_time),
        blowup_(blowup) {}

  double exit_time() const { return exit_time_; }
  bool blowup() const { return blowup_; }

 private:
  double exit_time_;
  bool blowup_;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// The integral is divergent (e.g. a power singularity with exponent >= 1).
class DivergentIntegral : public QuadratureError {
 public:
  using QuadratureError::QuadratureError;
};

/// A standing hypothesis of a criterion could not be verified numerically.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace semistab
