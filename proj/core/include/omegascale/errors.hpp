#pragma once

#include <stdexcept>
#include <string>

namespace omegascale {

// Root of everything the library throws on purpose. The CLI maps every
// subclass except ConfigError to the "numeric error" exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation not available for the given model variant (e.g. psi on a
// tabulated model).
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

// Iterative method or series did not converge within its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Volterra diagonal guard violated: grid too coarse for the weight.
class SolverGuardError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Precondition on a query or on the available tables (ordering, missing
// floor, missing derivatives, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed input files or job configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace omegascale
