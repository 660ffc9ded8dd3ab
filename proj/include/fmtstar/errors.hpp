#pragma once

#include <stdexcept>

namespace fmtstar {

/// Malformed or dimension-incompatible input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation method was asked to run outside its domain of validity.
class MethodError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generator, density or smoothing specification that cannot be realized.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cost model whose declared bounds or axioms are violated.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fmtstar
