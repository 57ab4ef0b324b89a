#include "sparsereg/penalty.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using sparsereg::CoefficientVector;
using sparsereg::PenaltySpec;

CoefficientVector random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  CoefficientVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = nd(gen);
  return z;
}

// q is passed in thousandths
void BM_ProxRq(benchmark::State& state) {
  const double q = static_cast<double>(state.range(0)) / 1000.0;
  const auto n = static_cast<Eigen::Index>(state.range(1));
  const CoefficientVector z = random_vector(n, 1);
  const PenaltySpec spec = PenaltySpec::uniform(q, static_cast<std::size_t>(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sparsereg::prox_rq(z, 0.3, spec));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ProxRq)->ArgsProduct({{1000, 1250, 1500, 1750, 2000}, {64, 4096}});

}  // namespace
