#pragma once

#include <stdexcept>
#include <string>

namespace nrrd {

// Common base so callers can catch everything thrown by this library at once.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument values (out of admissible range, non-finite data, ...).
struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// An iterative solver hit its iteration cap before meeting its tolerance.
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

// A linear system has no solution for the given right-hand side
// (pure-Neumann operator with a nonzero-mean source, singular factorization).
struct SolvabilityError : Error {
  explicit SolvabilityError(const std::string& msg) : Error(msg) {}
};

// A fixed-point or time iteration left every reasonable bound.
struct DivergenceError : Error {
  explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

// A single time step could not be completed at the requested dt;
// carries the dt that failed so the controller can retry smaller.
struct StepError : Error {
  double dt;
  StepError(const std::string& msg, double dt_) : Error(msg), dt(dt_) {}
};

// A state object is inconsistent (mismatched grids, wrong component count).
struct StateError : Error {
  explicit StateError(const std::string& msg) : Error(msg) {}
};

// A file being read is not in the expected on-disk format.
struct FormatError : Error {
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// A checkpoint or field refers to a different grid than the current run.
struct GridMismatchError : Error {
  explicit GridMismatchError(const std::string& msg) : Error(msg) {}
};

// Configuration text could not be parsed or violates a constraint.
struct ConfigError : Error {
  int line;
  ConfigError(const std::string& msg, int line_ = 0) : Error(msg), line(line_) {}
};

}  // namespace nrrd
