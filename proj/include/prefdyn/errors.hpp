#pragma once

#include <stdexcept>
#include <string>

namespace prefdyn {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroVectorError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

struct NotSymmetricError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct DegenerateSpanError : Error {
  using Error::Error;
};

struct IndexOutOfRangeError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct NoEigengapError : Error {
  using Error::Error;
};

struct BadKError : Error {
  using Error::Error;
};

struct EmptySelectionError : Error {
  using Error::Error;
};

// Feasibility failure of a design problem; carries the best residual reached.
struct InfeasibleError : Error {
  InfeasibleError(const std::string& what, double residual_)
      : Error(what), residual(residual_) {}
  double residual;
};

struct NoDominantFeasibleError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct InvariantBreachError : Error {
  using Error::Error;
};

}  // namespace prefdyn
