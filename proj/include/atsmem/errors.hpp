#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace atsmem {

// Argument outside the physical domain of an operation (negative temperature,
// zero transmission, non-finite input).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A scenario, grid or schedule that cannot be run as configured. Carries every
// offending key so a single validation pass reports all problems.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what), issues_{what} {}
  explicit ConfigError(std::vector<std::string> issues);

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Integration produced a non-finite or out-of-bounds state.
class NumericalError : public std::runtime_error {
 public:
  struct StepRecord {
    long step = 0;
    double time = 0.0;
    double field_norm = 0.0;
    double optical_norm = 0.0;
    double spin_norm = 0.0;
  };

  NumericalError(const std::string& what, StepRecord record);

  const StepRecord& record() const { return record_; }

 private:
  StepRecord record_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws DomainError unless value is finite.
void require_finite(double value, const char* name);

}  // namespace atsmem
