#pragma once

#include <stdexcept>
#include <string>

namespace bogolib {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated preconditions: bad shapes, out-of-range parameters.
struct ContractError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Iterative solver or factorization gave up. residual is the last measured value.
struct SolverError : Error {
  SolverError(const std::string& what, double residual) : Error(what), residual(residual) {}
  double residual;
};

}  // namespace bogolib
