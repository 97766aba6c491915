#ifndef QLINE_ERRORS_HPP
#define QLINE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qline {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// |delta| too large for the rotating-wave treatment.
struct RwaViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Steady-state null space is not one-dimensional.
struct DegenerateSteadyState : SolverError {
  using SolverError::SolverError;
};

// Population leaked into the top Fock level of the filter truncation.
struct TruncationOverflow : SolverError {
  using SolverError::SolverError;
};

// Mean output flux too small to normalize a correlation trace.
struct UndefinedTrace : SolverError {
  using SolverError::SolverError;
};

// Net power after noise subtraction is not positive.
struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace qline

#endif
