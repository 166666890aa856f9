#pragma once

#include <stdexcept>
#include <string>

namespace ccqed {

// Invalid physical input (negative rates, eta outside its admissible range, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument lies on a pole or branch singularity of a special function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A series did not meet its stopping rule before the term cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial_log_magnitude,
                   double partial_phase, double last_ratio)
      : std::runtime_error(what),
        partial_log_magnitude_(partial_log_magnitude),
        partial_phase_(partial_phase),
        last_ratio_(last_ratio) {}

  double partial_log_magnitude() const noexcept { return partial_log_magnitude_; }
  double partial_phase() const noexcept { return partial_phase_; }
  double last_ratio() const noexcept { return last_ratio_; }

 private:
  double partial_log_magnitude_;
  double partial_phase_;
  double last_ratio_;
};

// Overflow/underflow that survives the log-space treatment.
class NumericalRangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Fock truncation too small for the requested drive.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int dim, double boundary_population)
      : std::runtime_error(what), dim_(dim), boundary_population_(boundary_population) {}
  int dim() const noexcept { return dim_; }
  double boundary_population() const noexcept { return boundary_population_; }

 private:
  int dim_;
  double boundary_population_;
};

// The generator has more than one (near-)null direction.
class DegenerateSteadyStateError : public std::runtime_error {
 public:
  DegenerateSteadyStateError(const std::string& what, double smallest, double next)
      : std::runtime_error(what), smallest_(smallest), next_(next) {}
  double smallest_singular_value() const noexcept { return smallest_; }
  double next_singular_value() const noexcept { return next_; }

 private:
  double smallest_;
  double next_;
};

// Steady-state solve did not reach the residual target, even after the
// inverse-iteration fallback.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double relative_residual)
      : std::runtime_error(what), relative_residual_(relative_residual) {}
  double relative_residual() const noexcept { return relative_residual_; }

 private:
  double relative_residual_;
};

// Time integration lost trace or was asked to run with too coarse a step.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Output file could not be opened or written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccqed
