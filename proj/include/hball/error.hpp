#pragma once

#include <stdexcept>
#include <string>

namespace hball {

/// A series could not be summed to the requested tolerance (|x||y| = 1, or
/// the truncation degree would exceed the evaluation cap).
class NonConvergent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A (p, alpha, s, t) combination violates the admissibility condition of
/// the space it was used with.
class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A user-supplied integrand failed at a quadrature node.
class EvaluationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The inclusion question is outside the sharp conditions this library knows.
class UnsupportedPair : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hball
