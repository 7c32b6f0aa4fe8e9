#pragma once

#include <stdexcept>
#include <string>

namespace rmprod {

// Operation called with the wrong ensemble family, or parameters that violate
// a construction invariant. Maps to CLI exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Arguments outside a bound's or oracle's validity region. Exit code 1.
class ValidityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Request exceeds a configured capability (e.g. exact-norm dimension cap).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A product trajectory hit an exactly-zero stretch. Carries the 1-based step.
class DegenerateTrajectoryError : public std::runtime_error {
 public:
  DegenerateTrajectoryError(const std::string& what, int step)
      : std::runtime_error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

// Unreadable/unwritable destination. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rmprod
