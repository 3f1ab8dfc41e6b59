#pragma once

#include <stdexcept>
#include <string>

namespace pauli_annulus {

/// Precondition violated by a caller-supplied value (bad radius, h <= 0, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical guard tripped: the requested computation is outside what the
/// discretization or double precision can represent faithfully.
class NumericalGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid too coarse to resolve the weight e^{-2(phi - phi_min)/h}.
class ResolutionError : public NumericalGuardError {
 public:
  using NumericalGuardError::NumericalGuardError;
};

/// The angular-momentum window kept growing; f is coercive so this means a
/// bug or a pathological field.
class CoercivityError : public NumericalGuardError {
 public:
  using NumericalGuardError::NumericalGuardError;
};

/// A mathematical invariant that must hold by construction did not.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pauli_annulus
