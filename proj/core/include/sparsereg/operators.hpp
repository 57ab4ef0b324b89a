#pragma once

#include "sparsereg/types.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace sparsereg {

/// Forward map F from coefficient space (dimension cols()) to data space
/// (dimension rows()), defined on the whole coefficient space.
///
/// Implementations are immutable after construction; every member is
/// const and reentrant.
class ForwardOperator {
 public:
  virtual ~ForwardOperator() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual bool is_linear() const = 0;
  virtual std::string name() const = 0;

  /// F(u)
  DataVector apply(const CoefficientVector& u) const;
  /// F'(u) h
  DataVector derivative_apply(const CoefficientVector& u,
                              const CoefficientVector& h) const;
  /// F'(u)^* y
  CoefficientVector derivative_adjoint_apply(const CoefficientVector& u,
                                             const DataVector& y) const;

  /// Dense m x n matrix of F'(u), assembled column by column.
  Matrix derivative_matrix(const CoefficientVector& u) const;

 protected:
  virtual DataVector do_apply(const CoefficientVector& u) const = 0;
  virtual DataVector do_derivative_apply(const CoefficientVector& u,
                                         const CoefficientVector& h) const = 0;
  virtual CoefficientVector do_derivative_adjoint_apply(
      const CoefficientVector& u, const DataVector& y) const = 0;
};

using OperatorPtr = std::shared_ptr<const ForwardOperator>;

OperatorPtr make_dense_linear(Matrix matrix);
OperatorPtr make_diagonal_linear(Eigen::VectorXd singular_values);
/// Circular convolution y_i = sum_k kernel_k u_{(i-k) mod n}.
OperatorPtr make_convolution_linear(Eigen::VectorXd kernel, std::size_t n);
/// F(u) = A u + eps * B (u .* u).
OperatorPtr make_toy_nonlinear(Matrix a, Matrix b, double eps);

/// The linear map h -> F'(at) h, frozen at a point.
OperatorPtr make_linearization(OperatorPtr op, CoefficientVector at);

/// Largest eigenvalue of F'(at)^* F'(at) by power iteration
/// (at most 200 iterations or relative change below 1e-10).
double operator_norm_sq(const ForwardOperator& op, const CoefficientVector& at);
double operator_norm_sq(const ForwardOperator& op);

/// Row-major, header-free CSV of reals. Rows must have equal length.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Normalized samples of a Gaussian bump, length 2*ceil(3*width)+1.
Eigen::VectorXd gaussian_kernel(double width);

}  // namespace sparsereg
