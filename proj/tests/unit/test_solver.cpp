#include "oracles.hpp"

#include "sparsereg/penalty.hpp"
#include "sparsereg/random.hpp"
#include "sparsereg/solver.hpp"

#include <gtest/gtest.h>

using namespace sparsereg;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix randn(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = rng.normal() / std::sqrt(double(rows));
  return a;
}

Eigen::VectorXd randn(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

SolverConfig config(int p, double alpha) {
  SolverConfig c;
  c.p = p;
  c.alpha = alpha;
  return c;
}

}  // namespace

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.p = 3;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.tol = -1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.step_safety = 1.5;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(SolveP2, IdentityQuadratic) {
  const auto id = make_dense_linear(Matrix::Identity(2, 2));
  const auto rep = solve_linear_p2(*id, vec({2, 4}), PenaltySpec::uniform(2.0, 2), config(2, 1.0));
  EXPECT_TRUE(rep.converged);
  EXPECT_NEAR(rep.minimizer[0], 1.0, 1e-9);
  EXPECT_NEAR(rep.minimizer[1], 2.0, 1e-9);
  // 1-d oracle on (x - z)^2 + x^2
  const double x = static_cast<double>(oracle::golden_min<long double>(
      [](long double t) { return (t - 4) * (t - 4) + t * t; }, 0.0L, 4.0L, 1e-17L));
  EXPECT_NEAR(rep.minimizer[1], x, 1e-8);
}

TEST(SolveP2, IdentityL1) {
  const auto id = make_dense_linear(Matrix::Identity(2, 2));
  const auto rep = solve_linear_p2(*id, vec({2, 0.3}), PenaltySpec::uniform(1.0, 2), config(2, 1.0));
  EXPECT_TRUE(rep.converged);
  EXPECT_NEAR(rep.minimizer[0], 1.5, 1e-9);
  EXPECT_EQ(rep.minimizer[1], 0.0);
  for (double z : {2.0, 0.3}) {
    const double x = static_cast<double>(oracle::golden_min<long double>(
        [z](long double t) { return (t - z) * (t - z) + std::abs(t); }, -1.0L, 3.0L, 1e-17L));
    EXPECT_NEAR(z == 2.0 ? rep.minimizer[0] : rep.minimizer[1], x, 1e-8);
  }
}

TEST(SolveP2, ZeroData) {
  Rng rng(1);
  const auto op = make_dense_linear(randn(rng, 5, 7));
  const auto rep = solve_linear_p2(*op, Eigen::VectorXd::Zero(5), PenaltySpec::uniform(1.5, 7), config(2, 0.3));
  EXPECT_EQ(rep.minimizer.norm(), 0.0);
  EXPECT_TRUE(rep.converged);
}

TEST(SolveP2, RejectsWrongPathAndDims) {
  Rng rng(2);
  const auto toy = make_toy_nonlinear(randn(rng, 3, 3), randn(rng, 3, 3), 0.1);
  EXPECT_THROW(solve_linear_p2(*toy, vec({1, 2, 3}), PenaltySpec::uniform(1.0, 3), config(2, 1)), InvalidArgument);
  const auto id = make_dense_linear(Matrix::Identity(3, 3));
  EXPECT_THROW(solve_linear_p2(*id, vec({1, 2}), PenaltySpec::uniform(1.0, 3), config(2, 1)), InvalidArgument);
  EXPECT_THROW(solve_linear_p2(*id, vec({1, 2, 3}), PenaltySpec::uniform(1.0, 2), config(2, 1)), InvalidArgument);
  EXPECT_THROW(solve_linear_p2(*id, vec({1, 2, 3}), PenaltySpec::uniform(1.0, 3), config(1, 1)), InvalidArgument);
}

TEST(SolveP2, ReportAndTraceInvariants) {
  Rng rng(3);
  for (double q : {1.0, 1.3, 1.5, 2.0}) {
    const auto op = make_dense_linear(randn(rng, 20, 30));
    const Eigen::VectorXd v = randn(rng, 20);
    const PenaltySpec spec = PenaltySpec::uniform(q, 30, 0.7);
    const auto rep = solve_linear_p2(*op, v, spec, config(2, 0.05));
    EXPECT_TRUE(rep.converged);
    EXPECT_NEAR(rep.objective, rep.residual_norm * rep.residual_norm + 0.05 * rep.penalty_value,
                1e-10 * rep.objective);
    EXPECT_NEAR(rep.objective, tikhonov_objective(*op, v, spec, 2, 0.05, rep.minimizer), 1e-12 * rep.objective);
    for (std::size_t i = 1; i < rep.objective_trace.size(); ++i) {
      ASSERT_LE(rep.objective_trace[i], rep.objective_trace[i - 1]);
    }
  }
}

TEST(SolveP2, OptimalityCertificates) {
  Rng rng(4);
  for (double q : {1.0, 1.4, 1.8, 2.0}) {
    const Matrix a = randn(rng, 15, 25);
    const auto op = make_dense_linear(a);
    const Eigen::VectorXd v = randn(rng, 15);
    const double alpha = 0.1;
    const PenaltySpec spec = PenaltySpec::uniform(q, 25, 1.0);
    const auto rep = solve_linear_p2(*op, v, spec, config(2, alpha));
    const Eigen::VectorXd grad = 2.0 * a.transpose() * (a * rep.minimizer - v);
    if (q > 1.0) {
      EXPECT_LE((grad + alpha * subgradient_rq(rep.minimizer, spec)).cwiseAbs().maxCoeff(), 1e-6) << q;
    } else {
      for (Eigen::Index i = 0; i < 25; ++i) {
        const double ui = rep.minimizer[i];
        if (ui == 0.0) {
          EXPECT_LE(std::abs(grad[i]), alpha + 1e-6);
        } else {
          EXPECT_NEAR(grad[i], -alpha * (ui > 0 ? 1.0 : -1.0), 1e-6);
        }
      }
    }
  }
}

TEST(SolveP2, NotWorseThanTruth) {
  Rng rng(5);
  const auto op = make_diagonal_linear(Eigen::VectorXd::LinSpaced(20, 1.0, 0.05));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(20);
  u[2] = 1.0;
  u[7] = -0.7;
  const Eigen::VectorXd v = op->apply(u) + 0.01 * randn(rng, 20);
  for (double q : {1.0, 1.5, 2.0}) {
    const PenaltySpec spec = PenaltySpec::uniform(q, 20);
    const auto rep = solve(op, v, spec, config(2, 0.01));
    EXPECT_LE(rep.objective, tikhonov_objective(*op, v, spec, 2, 0.01, u) + 1e-10);
  }
}

TEST(SolveP2, ResidualGrowsWithAlpha) {
  Rng rng(6);
  const auto op = make_dense_linear(randn(rng, 12, 20));
  const Eigen::VectorXd v = randn(rng, 12);
  const PenaltySpec spec = PenaltySpec::uniform(1.5, 20);
  double previous = -1.0;
  for (double alpha : {0.001, 0.01, 0.1, 1.0, 10.0}) {
    const auto rep = solve(op, v, spec, config(2, alpha));
    EXPECT_GE(rep.residual_norm, previous - 1e-9);
    previous = rep.residual_norm;
  }
}

TEST(SolveP1, ScalarExample) {
  const auto one = make_dense_linear(Matrix::Ones(1, 1));
  auto cfg = config(1, 0.5);
  const auto rep = solve_linear_p1(*one, vec({2}), PenaltySpec::uniform(1.0, 1), cfg);
  EXPECT_TRUE(rep.converged);
  const double x = oracle::golden_min([](double t) { return std::abs(t - 2) + 0.5 * std::abs(t); }, -1, 4);
  EXPECT_NEAR(rep.minimizer[0], 2.0, 1e-8);
  EXPECT_NEAR(x, 2.0, 1e-8);
}

TEST(SolveP1, ZeroData) {
  Rng rng(7);
  const auto op = make_dense_linear(randn(rng, 6, 9));
  const auto rep = solve_linear_p1(*op, Eigen::VectorXd::Zero(6), PenaltySpec::uniform(1.0, 9), config(1, 0.5));
  EXPECT_LE(rep.minimizer.norm(), 1e-12);
}

TEST(SolveP1, ExactRecoveryNoiseFree) {
  Rng rng(8);
  const auto op = make_dense_linear(Matrix::Identity(10, 10));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(10);
  u[1] = 1.2;
  u[6] = -0.8;
  SolverConfig cfg = config(1, 0.1);
  cfg.tol = 1e-13;
  cfg.max_iter = 200000;
  const auto rep = solve_linear_p1(*op, op->apply(u), PenaltySpec::uniform(1.0, 10), cfg);
  EXPECT_LE((rep.minimizer - u).norm(), 1e-6 * (1 + u.norm()));
  EXPECT_NEAR(rep.objective, rep.residual_norm + 0.1 * rep.penalty_value, 1e-10 * std::max(1.0, rep.objective));
}

TEST(SolveP1, RejectsWrongPath) {
  const auto id = make_dense_linear(Matrix::Identity(2, 2));
  EXPECT_THROW(solve_linear_p1(*id, vec({1, 2}), PenaltySpec::uniform(1.0, 2), config(2, 1)), InvalidArgument);
}

TEST(SolveNonlinear, AgreesWithLinearAtZeroEps) {
  Rng rng(9);
  const Matrix a = randn(rng, 10, 12);
  const Eigen::VectorXd v = randn(rng, 10);
  const PenaltySpec spec = PenaltySpec::uniform(1.5, 12);
  const auto lin = solve_linear_p2(*make_dense_linear(a), v, spec, config(2, 0.1));
  const auto non = solve_nonlinear(make_toy_nonlinear(a, randn(rng, 10, 12), 0.0), v, spec, config(2, 0.1),
                                   Eigen::VectorXd::Zero(12));
  EXPECT_LE((lin.minimizer - non.minimizer).norm(), 1e-8);
}

TEST(SolveNonlinear, StartAtTruth) {
  Rng rng(10);
  OperatorPtr op = make_toy_nonlinear(randn(rng, 10, 12), randn(rng, 10, 12), 1e-3);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(12);
  u[3] = 1.0;
  u[8] = -0.6;
  const Eigen::VectorXd v = op->apply(u);
  const PenaltySpec spec = PenaltySpec::uniform(1.0, 12);
  const auto rep = solve_nonlinear(op, v, spec, config(2, 1e-3), u);
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.objective, tikhonov_objective(*op, v, spec, 2, 1e-3, u) + 1e-12);
}

TEST(SolveNonlinear, NotWorseThanLinearizedSolve) {
  Rng rng(11);
  OperatorPtr op = make_toy_nonlinear(randn(rng, 16, 16), randn(rng, 16, 16), 1e-3);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(16);
  u[0] = 0.9;
  u[5] = -1.1;
  u[11] = 0.6;
  const Eigen::VectorXd v = op->apply(u) + 0.01 * randn(rng, 16);
  const PenaltySpec spec = PenaltySpec::uniform(1.0, 16);
  const double alpha = 0.01;
  const auto non = solve(op, v, spec, config(2, alpha));
  // solve the problem linearized at u+, then score it under the true F
  const auto lin_op = make_linearization(op, u);
  const Eigen::VectorXd shifted = v - op->apply(u) + lin_op->apply(u);
  const auto lin = solve_linear_p2(*lin_op, shifted, spec, config(2, alpha));
  EXPECT_TRUE(non.converged);
  EXPECT_LE(non.objective, tikhonov_objective(*op, v, spec, 2, alpha, lin.minimizer) + 1e-6);
}

TEST(SolveNonlinear, RejectsP1) {
  Rng rng(12);
  OperatorPtr op = make_toy_nonlinear(randn(rng, 3, 3), randn(rng, 3, 3), 0.1);
  EXPECT_THROW(solve_nonlinear(op, vec({1, 2, 3}), PenaltySpec::uniform(1.0, 3), config(1, 1), vec({0, 0, 0})),
               InvalidArgument);
  EXPECT_THROW(solve(op, vec({1, 2, 3}), PenaltySpec::uniform(1.0, 3), config(1, 1)), InvalidArgument);
}
