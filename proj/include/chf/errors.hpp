#pragma once

#include <stdexcept>
#include <string>

namespace chf {

/// Base for all errors raised by the simulator. Each kind maps to a CLI exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_status() const noexcept { return 1; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_status() const noexcept override { return 3; }
};

/// NaN/Inf appeared in the state; carries the step index at which it was detected.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const noexcept { return step_; }
  int exit_status() const noexcept override { return 2; }

 private:
  long step_;
};

/// A sphere-valued field came too close to the origin to be projected.
/// Usually means the time step is too large.
class ProjectionDegenerateError : public Error {
 public:
  using Error::Error;
  int exit_status() const noexcept override { return 2; }
};

/// The map drifted off the target far beyond tolerance.
class StateCorruptionError : public Error {
 public:
  using Error::Error;
  int exit_status() const noexcept override { return 2; }
};

class SolverError : public Error {
 public:
  using Error::Error;
  int exit_status() const noexcept override { return 4; }
};

}  // namespace chf
