#pragma once

#include <stdexcept>
#include <string>

namespace expint {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed or schema-violating configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested φ order above kMaxPhiOrder, or a forcing/tableau order that is not supported.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise inadmissible argument.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Dense reference backend asked to work beyond its size limit.
class ReferenceScaleError : public Error {
 public:
  using Error::Error;
};

class OracleConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Fewer than three usable points for a rate fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Errors too small to fit (at or below round-off).
class NoiseFloorError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A step produced a non-finite state. step is -1 when raised outside a time loop.
class DivergenceError : public Error {
 public:
  DivergenceError(double t, long step)
      : Error(make_message(t, step)), t_(t), step_(step) {}

  double time() const noexcept { return t_; }
  long step() const noexcept { return step_; }

 private:
  static std::string make_message(double t, long step) {
    std::string msg = "non-finite state produced at t_n = " + std::to_string(t);
    if (step >= 0) msg += " (step " + std::to_string(step) + ")";
    return msg;
  }

  double t_;
  long step_;
};

}  // namespace expint
