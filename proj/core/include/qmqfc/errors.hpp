#pragma once

#include <stdexcept>
#include <string>

namespace qmqfc {

// Argument outside the domain of a model formula (negative power, zero
// wavelength, p = 0 where a ratio needs pairs, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An estimator has no defined value for the given counts (e.g. zero singles).
class UndefinedEstimate : public DomainError {
 public:
  using DomainError::DomainError;
};

// Malformed, out-of-range or unknown configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Curvature matrix of a least-squares problem is not invertible at the
// optimum; at least one parameter is not identifiable from the data.
class SingularFitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qmqfc
