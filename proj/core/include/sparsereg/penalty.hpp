#pragma once

#include "sparsereg/types.hpp"

#include <cstddef>

namespace sparsereg {

/// Exponent and weights of the weighted l^q functional
///   R_q(u) = sum_i w_i |u_i|^q,   1 <= q <= 2,  w_i >= w_min > 0.
class PenaltySpec {
 public:
  PenaltySpec(double q, Eigen::VectorXd weights);

  static PenaltySpec uniform(double q, std::size_t n, double weight = 1.0);

  double q() const { return q_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double w_min() const { return w_min_; }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }

  /// Copy with the same weights and a different exponent.
  PenaltySpec with_q(double q) const { return PenaltySpec(q, weights_); }

 private:
  double q_;
  Eigen::VectorXd weights_;
  double w_min_;
};

double eval_rq(const CoefficientVector& u, const PenaltySpec& spec);

/// (sum_i |c_i|^s)^{1/s} for s > 0, evaluated with max-scaling.
double sequence_norm(const Eigen::VectorXd& c, double s);

/// Canonical subgradient element. For q > 1 this is the gradient
/// q w_i |u_i|^{q-1} sgn(u_i); for q = 1 it is w_i sgn(u_i) (0 at u_i = 0).
CoefficientVector subgradient_rq(const CoefficientVector& u,
                                 const PenaltySpec& spec);

/// Coordinatewise bounds of the full subdifferential. Degenerate
/// (lower == upper) everywhere except at zero entries when q = 1,
/// where the interval is [-w_i, w_i].
struct SubgradientInterval {
  CoefficientVector lower;
  CoefficientVector upper;
  bool contains(const CoefficientVector& xi, double tol = 1e-9) const;
};

SubgradientInterval subgradient_interval(const CoefficientVector& u,
                                         const PenaltySpec& spec);

struct BregmanReport {
  double value = 0.0;        // R(u~) - R(u) - <xi, u~ - u>
  double lower_bound = 0.0;  // c_q |u~-u|^2 / (3 w_min + 2 R(u) + R(u~)); 0 for q = 1
  double slack = 0.0;        // value - lower_bound
};

/// Bregman distance of R_q at u with certificate xi.
/// Throws InvalidArgument if xi is not an element of the subdifferential at u.
BregmanReport bregman_distance(const CoefficientVector& u_tilde,
                               const CoefficientVector& u,
                               const PenaltySpec& spec,
                               const CoefficientVector& xi);

/// Best constant d_q of the scalar two-point inequality
///   d_q |a-b|^2 <= (|a|^{2-q} + |a-b|^{2-q})
///                  (|b|^q - |a|^q - q |a|^{q-1} sgn(a) (b-a)),
/// estimated by a scale-reduced grid search with golden-section refinement.
/// Requires 1 < q <= 2. Results are memoized per q.
double dq_constant(double q);

/// The constant c_q = d_q w_min^2 of the Bregman lower bound.
double bregman_constant(const PenaltySpec& spec);

/// Scalar prox: argmin_x 0.5 (x - z)^2 + tau_w |x|^q  (tau_w = tau * w).
double prox_scalar(double z, double tau_w, double q);

/// Coordinatewise minimizer of x -> 0.5 |x - z|^2 + tau R_q(x).
CoefficientVector prox_rq(const CoefficientVector& z, double tau,
                          const PenaltySpec& spec);

}  // namespace sparsereg
