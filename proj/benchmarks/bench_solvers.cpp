#include "sparsereg/experiments.hpp"
#include "sparsereg/solver.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace sparsereg;

ProblemInstance instance(ProblemKind kind, double q, int p) {
  ProblemOptions o;
  o.kind = kind;
  o.q = q;
  o.p = p;
  o.n = 64;
  o.m = kind == ProblemKind::RandomDense && q == 1.0 ? 32 : 64;
  o.seed = 7;
  return generate_problem(o);
}

// q in thousandths
void BM_SolveP2Diagonal(benchmark::State& state) {
  const double q = static_cast<double>(state.range(0)) / 1000.0;
  const ProblemInstance inst = instance(ProblemKind::Diagonal, q, 2);
  const double delta = 1e-2;
  const DataVector v = add_noise(inst.clean_data, delta, 1);
  SolverConfig cfg;
  cfg.alpha = alpha_rule(delta, 2, 1.0);
  cfg.tol = 1e-6;
  int iterations = 0;
  for (auto _ : state) {
    const SolveReport r = solve(inst.op, v, inst.spec, cfg);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.minimizer.data());
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_SolveP2Diagonal)->Arg(1000)->Arg(1500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SolveP1Dense(benchmark::State& state) {
  const ProblemInstance inst = instance(ProblemKind::RandomDense, 1.0, 1);
  SolverConfig cfg;
  cfg.p = 1;
  cfg.alpha = 0.5 / inst.source.beta2;
  cfg.tol = 1e-9;
  cfg.max_iter = 500000;
  int iterations = 0;
  for (auto _ : state) {
    const SolveReport r = solve(inst.op, inst.clean_data, inst.spec, cfg);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.minimizer.data());
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_SolveP1Dense)->Unit(benchmark::kMillisecond);

void BM_SolveNonlinear(benchmark::State& state) {
  const ProblemInstance inst = instance(ProblemKind::ToyNonlinear, 1.0, 2);
  const double delta = 1e-2;
  const DataVector v = add_noise(inst.clean_data, delta, 1);
  SolverConfig cfg;
  cfg.alpha = delta;
  cfg.tol = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(inst.op, v, inst.spec, cfg).minimizer.data());
  }
}
BENCHMARK(BM_SolveNonlinear)->Unit(benchmark::kMillisecond);

}  // namespace
