#pragma once

#include <stdexcept>
#include <string>

namespace twostrain {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is non-finite or outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A custom incidence family has no numerically stable I -> 0+ limit.
class UnsupportedLimitError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied object (e.g. an equilibrium) does not satisfy the
/// operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A root finder or nonlinear solver failed where a solution must exist.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The dense eigensolver did not converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace twostrain
