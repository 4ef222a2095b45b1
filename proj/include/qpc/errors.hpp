#pragma once

#include <stdexcept>
#include <string>

namespace qpc {

// Exception hierarchy. The CLI maps these onto exit codes.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid input: NaN entries, out-of-window indices, z = 0, ...
struct DomainError : Error {
  using Error::Error;
};

/// Operation needs a positive Lyapunov exponent and did not get one.
struct RegimeError : Error {
  using Error::Error;
};

/// Exact zero in a denominator (Green's function at an eigenvalue).
struct PoleError : Error {
  using Error::Error;
};

/// Winding number could not be snapped to an integer.
struct ContourError : Error {
  using Error::Error;
};

/// Quadrature refinements disagree.
struct PrecisionError : Error {
  using Error::Error;
};

/// Requested scale is below the resolution of the sampled data.
struct ResolutionError : Error {
  using Error::Error;
};

struct BudgetError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qpc
