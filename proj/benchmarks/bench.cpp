#include <benchmark/benchmark.h>

#include "paravmo/generators.hpp"
#include "paravmo/john_nirenberg.hpp"
#include "paravmo/paraproduct.hpp"

using namespace paravmo;

namespace {

struct Fixture {
  TreePtr tree;
  Measure mu;
  SimpleFunction b;
  CubeCollection full;

  explicit Fixture(int depth)
      : tree(DyadicTree::unit(depth)),
        mu(doubling_measure(tree, 0.1, 1)),
        b(random_symbol(*tree, 2)),
        full(CubeCollection::non_leaf(*tree)) {}
};

void BM_Assemble(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(f.b, f.full, f.mu));
  state.SetComplexityN(static_cast<std::int64_t>(f.tree->leaf_count()));
}
BENCHMARK(BM_Assemble)->DenseRange(6, 12, 2);

void BM_ExactSpectrum(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const ParaproductOperator op = assemble(f.b, f.full, f.mu);
  for (auto _ : state) benchmark::DoNotOptimize(opnorm_p2(op));
}
BENCHMARK(BM_ExactSpectrum)->DenseRange(5, 9)->Unit(benchmark::kMillisecond);

void BM_PowerIteration(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const ParaproductOperator op = assemble(f.b, f.full, f.mu);
  for (auto _ : state) benchmark::DoNotOptimize(power_iteration_norm(op));
}
BENCHMARK(BM_PowerIteration)->DenseRange(6, 14, 2)->Unit(benchmark::kMillisecond);

void BM_Carleson(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(carleson_testing_norm(f.b, f.full, 2.0, f.mu));
}
BENCHMARK(BM_Carleson)->DenseRange(6, 16, 2);

void BM_StoppingForest(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const MartingaleFamily fam = MartingaleFamily::random(f.mu, f.full, 3, 1.0, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(build_stopping_forest(fam, f.tree->root()));
}
BENCHMARK(BM_StoppingForest)->DenseRange(6, 12, 2);

}  // namespace

BENCHMARK_MAIN();
