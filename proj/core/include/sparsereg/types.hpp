#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sparsereg {

/// Coefficients <phi_i, u> of the primal variable in the (orthonormal) basis.
/// The basis is implicit: the coefficient vector IS the primal variable.
using CoefficientVector = Eigen::VectorXd;

/// Element of the (Euclidean) data space.
using DataVector = Eigen::VectorXd;

using Matrix = Eigen::MatrixXd;

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce a meaningful answer
/// (e.g. too few valid points for a rate fit).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.allFinite();
}

}  // namespace sparsereg
