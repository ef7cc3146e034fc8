#include <benchmark/benchmark.h>

#include "crosstune/association.hpp"
#include "crosstune/rng.hpp"

using namespace crosstune;

static void BM_HungarianAssign(benchmark::State& state) {
  const int g = static_cast<int>(state.range(0));
  const int m = g / 5;
  Rng rng(11);
  Mat cost(g, m);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < m; ++j)
      cost(i, j) = static_cast<double>(rng.uniform_int(std::uint64_t{100}));
  for (auto _ : state) {
    Assignment a = hungarian_assign(cost);
    benchmark::DoNotOptimize(a.total_cost);
  }
  state.SetComplexityN(g);
}
BENCHMARK(BM_HungarianAssign)->Arg(50)->Arg(100)->Arg(150)->Complexity();
