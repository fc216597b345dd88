#pragma once

#include <stdexcept>
#include <string>

namespace fixlab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Inputs are outside the model's domain (bad graph, w too large, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

class ConstructionError : public DomainError {
  public:
    using DomainError::DomainError;
};

class SimplicityError : public DomainError {
  public:
    using DomainError::DomainError;
};

class RegularityError : public DomainError {
  public:
    using DomainError::DomainError;
};

class ConnectivityError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Some fitness value is not strictly positive for the requested w.
class WMaxViolation : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Payoff matrix violates equal-gains-from-switching or is not canonical
/// where the canonical (b, c) form is required.
class UnsupportedPayoff : public DomainError {
  public:
    using DomainError::DomainError;
};

/// b/k == c (death-birth) or b/(k+2) == c (imitation): no critical size.
class CriticalRatio : public DomainError {
  public:
    using DomainError::DomainError;
};

class EstimateUnavailable : public Error {
  public:
    using Error::Error;
};

/// Two independent computational routes disagree.
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

} // namespace fixlab
