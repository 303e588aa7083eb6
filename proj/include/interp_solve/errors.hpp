#pragma once

#include <stdexcept>
#include <string>

namespace interp_solve {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vector / operator dimension mismatch.
struct DimensionError : Error {
  using Error::Error;
};

// Hyperparameter outside its admissible range (step sizes, relaxation, ...).
struct ParameterError : Error {
  using Error::Error;
};

// Constant estimation failed (no usable sample pairs, missing reference point).
struct EstimationError : Error {
  using Error::Error;
};

// Bound checking asked for data the trajectory does not carry.
struct DiagnosticsError : Error {
  using Error::Error;
};

// Operation not defined for this problem (e.g. exact resolvent of a nonlinear field).
struct UnsupportedError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

// ConvergenceError / DivergenceError carry a partial Trajectory and live in
// solvers.hpp where that type is defined.

}  // namespace interp_solve
