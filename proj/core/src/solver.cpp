#include "sparsereg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sparsereg {

namespace {

void require_problem_dims(const ForwardOperator& op, const DataVector& data,
                          const PenaltySpec& spec) {
  if (static_cast<std::size_t>(data.size()) != op.rows()) {
    throw InvalidArgument("data length " + std::to_string(data.size()) +
                          " does not match operator rows " + std::to_string(op.rows()));
  }
  if (spec.size() != op.cols()) {
    throw InvalidArgument("penalty length " + std::to_string(spec.size()) +
                          " does not match operator columns " + std::to_string(op.cols()));
  }
}

double scaled_change(const Eigen::VectorXd& step, const Eigen::VectorXd& x) {
  return step.norm() / std::max(1.0, x.norm());
}

void finish(SolveReport& report, const ForwardOperator& op, const DataVector& data,
            const PenaltySpec& spec, int p, double alpha) {
  report.residual_norm = (op.apply(report.minimizer) - data).norm();
  report.penalty_value = eval_rq(report.minimizer, spec);
  report.objective = std::pow(report.residual_norm, p) + alpha * report.penalty_value;
}

}  // namespace

void SolverConfig::validate() const {
  if (p != 1 && p != 2) throw InvalidArgument("data exponent p must be 1 or 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be positive and finite");
  }
  if (max_iter <= 0 || inner_max_iter <= 0) {
    throw InvalidArgument("iteration limits must be positive");
  }
  if (!(tol > 0.0) || !(inner_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (!(step_safety > 0.0 && step_safety <= 1.0)) {
    throw InvalidArgument("step_safety must lie in (0, 1]");
  }
}

double tikhonov_objective(const ForwardOperator& op, const DataVector& data,
                          const PenaltySpec& spec, int p, double alpha,
                          const CoefficientVector& u) {
  return std::pow((op.apply(u) - data).norm(), p) + alpha * eval_rq(u, spec);
}

SolveReport solve_linear_p2(const ForwardOperator& op, const DataVector& data,
                            const PenaltySpec& spec, const SolverConfig& cfg,
                            const std::optional<CoefficientVector>& x0) {
  cfg.validate();
  if (cfg.p != 2) throw InvalidArgument("solve_linear_p2 requires p = 2");
  if (!op.is_linear()) throw InvalidArgument("solve_linear_p2 requires a linear operator");
  require_problem_dims(op, data, spec);

  const auto n = static_cast<Eigen::Index>(op.cols());
  const CoefficientVector origin = CoefficientVector::Zero(n);
  double lipschitz = operator_norm_sq(op, origin);
  if (lipschitz <= 0.0) lipschitz = 1.0;
  // Gradient of |Ku - v|^2 is 2 K^*(Ku - v), Lipschitz with constant 2 |K|^2.
  const double step = cfg.step_safety / (2.0 * lipschitz);
  const double prox_tau = step * cfg.alpha;

  const auto objective = [&](const CoefficientVector& u, DataVector& residual) {
    residual = op.apply(u) - data;
    return residual.squaredNorm() + cfg.alpha * eval_rq(u, spec);
  };

  CoefficientVector x = x0 ? *x0 : origin;
  if (x.size() != n) throw InvalidArgument("initial guess has wrong length");
  CoefficientVector y = x;
  DataVector residual;
  double fx = objective(x, residual);
  double momentum = 1.0;

  SolveReport report;
  report.objective_trace.reserve(std::min(cfg.max_iter, 4096));
  report.objective_trace.push_back(fx);

  DataVector residual_y;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    residual_y = op.apply(y) - data;
    const CoefficientVector gradient = 2.0 * op.derivative_adjoint_apply(origin, residual_y);
    const CoefficientVector z = prox_rq(y - step * gradient, prox_tau, spec);
    DataVector residual_z;
    const double fz = objective(z, residual_z);

    const double change = scaled_change(z - y, z);
    report.iterations = it;
    report.last_step = (z - y).norm();

    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    if (fz <= fx) {
      const CoefficientVector x_prev = x;
      x = z;
      fx = fz;
      y = x + ((momentum - 1.0) / next_momentum) * (x - x_prev);
      momentum = next_momentum;
    } else if (momentum == 1.0) {
      // A plain step from the incumbent no longer decreases the objective:
      // the remaining decrease is below rounding.
      report.objective_trace.push_back(fx);
      report.converged = true;
      break;
    } else {
      // Reject the accelerated point and restart from the incumbent.
      y = x;
      momentum = 1.0;
    }
    report.objective_trace.push_back(fx);

    if (change < cfg.tol) {
      report.converged = true;
      break;
    }
  }

  report.minimizer = x;
  finish(report, op, data, spec, 2, cfg.alpha);
  return report;
}

SolveReport solve_linear_p1(const ForwardOperator& op, const DataVector& data,
                            const PenaltySpec& spec, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.p != 1) throw InvalidArgument("solve_linear_p1 requires p = 1");
  if (!op.is_linear()) throw InvalidArgument("solve_linear_p1 requires a linear operator");
  require_problem_dims(op, data, spec);

  const auto n = static_cast<Eigen::Index>(op.cols());
  const CoefficientVector origin = CoefficientVector::Zero(n);
  double lipschitz = operator_norm_sq(op, origin);
  if (lipschitz <= 0.0) lipschitz = 1.0;
  // sigma * tau * L <= safety^2 < 1
  const double tau = cfg.step_safety / std::sqrt(lipschitz);
  const double sigma = cfg.step_safety / std::sqrt(lipschitz);

  CoefficientVector u = origin;
  CoefficientVector u_bar = u;
  DataVector y = DataVector::Zero(static_cast<Eigen::Index>(op.rows()));

  SolveReport report;
  report.objective_trace.push_back(tikhonov_objective(op, data, spec, 1, cfg.alpha, u));

  for (int it = 1; it <= cfg.max_iter; ++it) {
    // Dual step: prox of sigma f^*, f(w) = |w - v|, is a shifted projection
    // onto the unit ball.
    DataVector y_next = y + sigma * (op.apply(u_bar) - data);
    const double y_norm = y_next.norm();
    if (y_norm > 1.0) y_next /= y_norm;

    CoefficientVector u_next =
        prox_rq(u - tau * op.derivative_adjoint_apply(origin, y_next), tau * cfg.alpha, spec);
    u_bar = 2.0 * u_next - u;

    const double primal_change = scaled_change(u_next - u, u_next);
    const double dual_change = scaled_change(y_next - y, y_next);
    report.iterations = it;
    report.last_step = (u_next - u).norm();
    u = std::move(u_next);
    y = std::move(y_next);

    if (it % 16 == 0) {
      report.objective_trace.push_back(tikhonov_objective(op, data, spec, 1, cfg.alpha, u));
    }
    if (primal_change < cfg.tol && dual_change < cfg.tol) {
      report.converged = true;
      break;
    }
  }

  report.minimizer = u;
  finish(report, op, data, spec, 1, cfg.alpha);
  report.objective_trace.push_back(report.objective);
  return report;
}

SolveReport solve_nonlinear(const OperatorPtr& op, const DataVector& data,
                            const PenaltySpec& spec, const SolverConfig& cfg,
                            const CoefficientVector& u0) {
  cfg.validate();
  if (cfg.p != 2) throw InvalidArgument("solve_nonlinear supports p = 2 only");
  require_problem_dims(*op, data, spec);
  if (static_cast<std::size_t>(u0.size()) != op->cols()) {
    throw InvalidArgument("initial guess has wrong length");
  }

  SolverConfig inner = cfg;
  inner.max_iter = cfg.inner_max_iter;
  inner.tol = cfg.inner_tol;

  CoefficientVector u = u0;
  double fu = tikhonov_objective(*op, data, spec, 2, cfg.alpha, u);

  SolveReport report;
  report.objective_trace.push_back(fu);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    report.iterations = it;
    const OperatorPtr linear = make_linearization(op, u);
    // min_x |F(u) + F'(u)(x - u) - v|^2 + alpha R(x)
    const DataVector shifted = data - op->apply(u) + linear->apply(u);
    const SolveReport sub = solve_linear_p2(*linear, shifted, spec, inner, u);
    const CoefficientVector direction = sub.minimizer - u;

    double t = 1.0;
    CoefficientVector candidate = u + direction;
    double fc = tikhonov_objective(*op, data, spec, 2, cfg.alpha, candidate);
    for (int halving = 0; halving < 20 && fc > fu; ++halving) {
      t *= 0.5;
      candidate = u + t * direction;
      fc = tikhonov_objective(*op, data, spec, 2, cfg.alpha, candidate);
    }

    const double change = scaled_change(candidate - u, candidate);
    report.last_step = (candidate - u).norm();
    if (fc <= fu) {
      u = std::move(candidate);
      fu = fc;
    }
    report.objective_trace.push_back(fu);
    if (change < cfg.tol || scaled_change(direction, u) < cfg.tol) {
      report.converged = true;
      break;
    }
    if (fc > fu) break;  // no descent along the Gauss-Newton direction
  }

  report.minimizer = u;
  finish(report, *op, data, spec, 2, cfg.alpha);
  return report;
}

SolveReport solve(const OperatorPtr& op, const DataVector& data,
                  const PenaltySpec& spec, const SolverConfig& cfg) {
  if (!op->is_linear()) {
    return solve_nonlinear(op, data, spec, cfg,
                           CoefficientVector::Zero(static_cast<Eigen::Index>(op->cols())));
  }
  return cfg.p == 1 ? solve_linear_p1(*op, data, spec, cfg)
                    : solve_linear_p2(*op, data, spec, cfg);
}

}  // namespace sparsereg
