#pragma once

#include <stdexcept>
#include <string>

namespace qdp {

// Argument outside the mathematical domain of an operation (non-positive
// price, strike outside the grid, probability outside [0, 1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A requested register or grid exceeds the dense-simulation cap.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Subsystem lookup or dimension mismatch against a RegisterLayout.
class LayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operator that should be unitary is not, or a value object failed its
// construction checks.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qdp
