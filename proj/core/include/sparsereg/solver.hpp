#pragma once

#include "sparsereg/operators.hpp"
#include "sparsereg/penalty.hpp"

#include <optional>
#include <vector>

namespace sparsereg {

struct SolverConfig {
  int p = 2;                 // data exponent, 1 or 2
  double alpha = 1.0;        // regularization weight
  int max_iter = 50000;
  double tol = 1e-10;        // relative iterate change
  int inner_max_iter = 50000;  // linearized subproblems (nonlinear path)
  double inner_tol = 1e-12;
  double step_safety = 0.99;   // fraction of the admissible step

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

/// Result of minimizing |F(u) - v|^p + alpha R_q(u).
struct SolveReport {
  CoefficientVector minimizer;
  double objective = 0.0;
  double residual_norm = 0.0;   // |F(u) - v|
  double penalty_value = 0.0;   // R_q(u)
  int iterations = 0;
  bool converged = false;
  double last_step = 0.0;       // norm of the final iterate update
  std::vector<double> objective_trace;
};

/// Tikhonov objective |F(u) - v|^p + alpha R_q(u).
double tikhonov_objective(const ForwardOperator& op, const DataVector& data,
                          const PenaltySpec& spec, int p, double alpha,
                          const CoefficientVector& u);

/// p = 2, linear F: monotone accelerated proximal gradient (FISTA with
/// objective-based restart). The objective trace is nonincreasing.
SolveReport solve_linear_p2(const ForwardOperator& op, const DataVector& data,
                            const PenaltySpec& spec, const SolverConfig& cfg,
                            const std::optional<CoefficientVector>& x0 = std::nullopt);

/// p = 1, linear F: first-order primal-dual iteration for
///   min_u |K u - v| + alpha R_q(u).
SolveReport solve_linear_p1(const ForwardOperator& op, const DataVector& data,
                            const PenaltySpec& spec, const SolverConfig& cfg);

/// p = 2, differentiable F: Gauss-Newton outer loop whose linearized
/// Tikhonov subproblems are solved by solve_linear_p2, with step halving
/// while the true objective increases.
SolveReport solve_nonlinear(const OperatorPtr& op, const DataVector& data,
                            const PenaltySpec& spec, const SolverConfig& cfg,
                            const CoefficientVector& u0);

/// Dispatch on p and linearity; nonlinear problems start from zero.
SolveReport solve(const OperatorPtr& op, const DataVector& data,
                  const PenaltySpec& spec, const SolverConfig& cfg);

}  // namespace sparsereg
