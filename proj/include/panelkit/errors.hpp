#pragma once

#include <stdexcept>
#include <string>

/*
 * errors.hpp
 * ----------
 * Exception hierarchy for the toolkit. The CLI maps data and configuration
 * problems to exit code 1 and solver/inference problems to exit code 2.
 */

namespace panelkit {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable input: bad CSV/JSON, missing columns, non-finite outcomes.
class ParseError : public Error {
public:
  using Error::Error;
};

// A (unit, period) cell required for a balanced panel is missing.
class BalanceError : public Error {
public:
  BalanceError(std::string unit_in, int period_in)
      : Error("unbalanced panel: missing observation for unit \"" + unit_in +
              "\" in period " + std::to_string(period_in)),
        unit(std::move(unit_in)),
        period(period_in) {}
  std::string unit;
  int period;
};

// The same (unit, period) cell appears more than once.
class DuplicateError : public Error {
public:
  DuplicateError(std::string unit_in, int period_in)
      : Error("duplicate observation for unit \"" + unit_in + "\" in period " +
              std::to_string(period_in)),
        unit(std::move(unit_in)),
        period(period_in) {}
  std::string unit;
  int period;
};

// Treated flag varies within a unit.
class AssignmentError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

// Zero growth denominator, nonpositive baseline, and similar degeneracies.
class DegenerateOutcomeError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

// Solver ran out of iterations before certifying optimality.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& msg, double last_objective_in, double gap_in)
      : Error(msg + " (objective " + std::to_string(last_objective_in) +
              ", optimality gap " + std::to_string(gap_in) + ")"),
        last_objective(last_objective_in),
        gap(gap_in) {}
  double last_objective;
  double gap;
};

class InferenceError : public Error {
public:
  explicit InferenceError(const std::string& msg, int failures_in = 0)
      : Error(msg), failures(failures_in) {}
  int failures;
};

}  // namespace panelkit
