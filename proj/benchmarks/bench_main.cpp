#include <benchmark/benchmark.h>

#include <random>

#include "hyperobs/design.hpp"
#include "hyperobs/global.hpp"
#include "hyperobs/local.hpp"
#include "support/oracles.hpp"
#include "support/systems.hpp"

using namespace hyperobs;

namespace {

SparseTensor bench_tensor(int order, int dim) {
  std::mt19937_64 rng(1);
  return oracle::random_tensor(rng, order, dim, 0.4);
}

}  // namespace

static void BM_ContractVectorPower(benchmark::State& state) {
  SparseTensor t = bench_tensor(3, static_cast<int>(state.range(0)));
  std::mt19937_64 rng(2);
  RationalVector x = oracle::random_vector(rng, t.dim());
  for (auto _ : state) benchmark::DoNotOptimize(contract_vector_power(t, x));
}
BENCHMARK(BM_ContractVectorPower)->Arg(4)->Arg(8);

static void BM_Symmetrize(benchmark::State& state) {
  SparseTensor t = bench_tensor(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(symmetrize(t));
}
BENCHMARK(BM_Symmetrize)->Arg(3)->Arg(4);

static void BM_UnfoldKron(benchmark::State& state) {
  SparseTensor t = bench_tensor(4, 4);
  std::mt19937_64 rng(3);
  RationalVector x = oracle::random_vector(rng, 4);
  for (auto _ : state) {
    SparseMatrix m = unfold(t);
    RationalVector k = kron_power(x, 3);
    RationalVector out(t.dim(), Rat(0));
    for (const auto& [rc, v] : m.entries) out[rc.first] += v * k[rc.second];
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_UnfoldKron);

static void BM_LieDerivativeChainLevel(benchmark::State& state) {
  HypergraphSystem sys = testsys::population();
  VarSpace::Ptr x = VarSpace::states(3);
  auto f = lower_dynamics(sys, x);
  Polynomial v = lower_outputs(sys, x)[0];
  for (int r = 0; r < state.range(0) - 1; ++r) v = lie_derivative(v, f);
  for (auto _ : state) benchmark::DoNotOptimize(lie_derivative(v, f));
}
BENCHMARK(BM_LieDerivativeChainLevel)->Arg(2)->Arg(4);

static void BM_BuchbergerPopulationLevel2(benchmark::State& state) {
  IdealChain chain = build_chain(testsys::population());
  std::vector<Polynomial> gens;
  for (int level = 0; level <= 2; ++level)
    for (const auto& g : chain.layers[level]) gens.push_back(g);
  for (auto _ : state)
    benchmark::DoNotOptimize(buchberger(gens, MonomialOrder::grevlex()));
}
BENCHMARK(BM_BuchbergerPopulationLevel2);

static void BM_GlobalVerdictPopulation(benchmark::State& state) {
  HypergraphSystem sys = testsys::population();
  std::vector<Rat> sigma{Rat(1), Rat(1), Rat(1)};
  for (auto _ : state) benchmark::DoNotOptimize(analyze_global(sys, sigma));
}
BENCHMARK(BM_GlobalVerdictPopulation);

static void BM_GlobalVerdictCubicRing(benchmark::State& state) {
  HypergraphSystem sys = testsys::cubic_ring();
  std::vector<Rat> sigma{Rat(1), Rat(1), Rat(1)};
  for (auto _ : state) benchmark::DoNotOptimize(analyze_global(sys, sigma));
}
BENCHMARK(BM_GlobalVerdictCubicRing);

static void BM_ObservabilityMatrix(benchmark::State& state) {
  HypergraphSystem sys = testsys::population();
  for (auto _ : state) benchmark::DoNotOptimize(matrix_O(sys));
}
BENCHMARK(BM_ObservabilityMatrix);

static void BM_DesignSumOfSquares(benchmark::State& state) {
  HypergraphSystem dyn = testsys::sum_of_squares_dynamics();
  DesignConfig cfg;
  cfg.d_max = 2;
  cfg.p = 1;
  std::vector<Rat> zero{Rat(0), Rat(0), Rat(0)};
  for (auto _ : state) benchmark::DoNotOptimize(design_outputs(dyn, zero, cfg));
}
BENCHMARK(BM_DesignSumOfSquares);

BENCHMARK_MAIN();
