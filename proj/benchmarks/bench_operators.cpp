#include "sparsereg/operators.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace sparsereg;

OperatorPtr build(int kind, std::size_t n) {
  const auto ni = static_cast<Eigen::Index>(n);
  switch (kind) {
    case 0: return make_dense_linear(Matrix::Random(ni / 2, ni));
    case 1: return make_diagonal_linear(Eigen::VectorXd::LinSpaced(ni, 1.0, 0.01));
    case 2: return make_convolution_linear(gaussian_kernel(3.0), n);
    default: return make_toy_nonlinear(Matrix::Random(ni / 2, ni), Matrix::Random(ni / 2, ni), 1e-3);
  }
}

// kind: 0 dense, 1 diagonal, 2 convolution, 3 toy nonlinear
void BM_Apply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(1));
  const OperatorPtr op = build(static_cast<int>(state.range(0)), n);
  const CoefficientVector u = CoefficientVector::Random(static_cast<Eigen::Index>(n));
  for (auto _ : state) benchmark::DoNotOptimize(op->apply(u));
}
BENCHMARK(BM_Apply)->ArgsProduct({{0, 1, 2, 3}, {64, 512}});

void BM_Adjoint(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(1));
  const OperatorPtr op = build(static_cast<int>(state.range(0)), n);
  const CoefficientVector u = CoefficientVector::Random(static_cast<Eigen::Index>(n));
  const DataVector y = DataVector::Random(static_cast<Eigen::Index>(op->rows()));
  for (auto _ : state) benchmark::DoNotOptimize(op->derivative_adjoint_apply(u, y));
}
BENCHMARK(BM_Adjoint)->ArgsProduct({{0, 1, 2, 3}, {64, 512}});

void BM_OperatorNorm(benchmark::State& state) {
  const OperatorPtr op = build(0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm_sq(*op));
}
BENCHMARK(BM_OperatorNorm)->Arg(64)->Arg(512);

}  // namespace
