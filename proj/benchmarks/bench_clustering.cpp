#include <benchmark/benchmark.h>

#include "crosstune/clustering.hpp"
#include "crosstune/rng.hpp"

using namespace crosstune;

namespace {

Mat random_similarity(int n, std::uint64_t seed) {
  Rng rng(seed);
  Mat sim(n, n);
  for (int i = 0; i < n; ++i) {
    sim(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = -rng.uniform(0.0, 4.0);
      sim(i, j) = v;
      sim(j, i) = v;
    }
  }
  return sim;
}

}  // namespace

static void BM_AgglomerativeMerge(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mat sim = random_similarity(n, 42);
  const int g = std::max(2, n / 50);
  for (auto _ : state) {
    ClusterSet cs = agglomerative_cluster(sim, g);
    benchmark::DoNotOptimize(cs.membership.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_AgglomerativeMerge)->Arg(128)->Arg(512)->Arg(2048)->Complexity();

static void BM_MultiCut(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mat sim = random_similarity(n, 7);
  const std::vector<int> gs = {n / 10, n / 15, n / 20, n / 25};
  for (auto _ : state) {
    auto cuts = agglomerative_cluster_cuts(sim, gs);
    benchmark::DoNotOptimize(cuts.data());
  }
}
BENCHMARK(BM_MultiCut)->Arg(512)->Arg(2048);
