#include <benchmark/benchmark.h>

#include "crosstune/model_update.hpp"
#include "crosstune/rng.hpp"

using namespace crosstune;

namespace {

struct Fixture {
  Mat features;
  std::vector<SoftLabel> soft;
  AdapterModel model;
};

Fixture make_fixture(int n, int d, int m) {
  Rng rng(5);
  Fixture f;
  f.features.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) f.features(i, j) = rng.gaussian();
    f.features.row(i) /= f.features.row(i).norm();
  }
  for (int i = 0; i < n; ++i) {
    SoftLabel s;
    s.probs = Vec::Zero(m);
    s.probs[static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m)))] = 1.0;
    s.vote_count = 4;
    f.soft.push_back(std::move(s));
  }
  f.model = AdapterModel::init(d, m, 1);
  return f;
}

}  // namespace

static void BM_LossForward(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), 32, 30);
  for (auto _ : state) {
    LossParts parts = loss(f.features, f.soft, f.model, 0.01);
    benchmark::DoNotOptimize(parts.total);
  }
}
BENCHMARK(BM_LossForward)->Arg(50)->Arg(500)->Arg(5000);

static void BM_Gradients(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), 32, 30);
  for (auto _ : state) {
    Gradients g = gradients(f.features, f.soft, f.model, 0.01);
    benchmark::DoNotOptimize(g.A.data());
  }
}
BENCHMARK(BM_Gradients)->Arg(50)->Arg(500);
