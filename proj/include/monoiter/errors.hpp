#pragma once

#include <stdexcept>
#include <string>

namespace monoiter {

/// Malformed or inconsistent input: parse failures, IO problems, mismatched
/// domains, out-of-range parameters. The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field or dual vector was combined with one living on another domain.
class DomainMismatch : public InputError {
 public:
  using InputError::InputError;
};

/// An operation refused to run because one of its mathematical prerequisites
/// (M-matrix stiffness, verified bracket, positive coefficient) does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace monoiter
