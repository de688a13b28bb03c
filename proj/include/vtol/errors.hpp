#pragma once

#include <stdexcept>
#include <string>

namespace vtol {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violated a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// An axis or direction needed by a projection or normalization is (near) zero.
class DegenerateAxis : public Error {
 public:
  using Error::Error;
};

/// A geometric construction is singular at the current operating point
/// (aligned air velocity and acceleration, vertical heading, ...).
class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

/// Integration produced non-finite values or left the rotation group.
class NumericalDivergence : public Error {
 public:
  using Error::Error;
};

/// The actuator mixer cannot realize the requested wrench.
class AllocationInfeasible : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vtol
