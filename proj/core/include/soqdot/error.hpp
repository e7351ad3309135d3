#pragma once

#include <stdexcept>
#include <string>

namespace soqdot {

// Bad input: shape mismatch, invariant violation, non-Hermitian operator, ...
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A spectral function was asked to evaluate outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical failure inside an otherwise valid computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace soqdot
