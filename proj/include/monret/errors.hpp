#pragma once

#include <stdexcept>
#include <string>

namespace monret {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: violated invariants, bad config, unknown keys.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A linear system built from 1 - z*Gamma is singular or nearly so. This is the
// physical divergence at resonant parameters, not a bug.
class ResonanceError : public Error {
 public:
  ResonanceError(const std::string& what, double condition_estimate = 0.0)
      : Error(what), condition_estimate_(condition_estimate) {}

  // Reciprocal condition number of the offending system, 0 if not applicable.
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

// An internal consistency check failed (non-real trace, norm mismatch, ...).
class NumericalHealthError : public Error {
 public:
  using Error::Error;
};

// A winding number is not defined: the curve passes (numerically) through
// the origin, a root sits on the unit circle, or the sampling grid cannot
// resolve the phase.
class UndefinedWinding : public NumericalHealthError {
 public:
  using NumericalHealthError::NumericalHealthError;
};

}  // namespace monret
