// Serial reference vs OpenMP path for the two parallel kernels.

#include "usdr/refine.hpp"
#include "usdr/synth.hpp"

#include <benchmark/benchmark.h>

using namespace usdr;

namespace {

struct Fixture {
  Dataset data;
  SubsetPlan plan;
  ModelConfig pca{PcaConfig{5, true}, ResidualReduction::Mae};
  ModelConfig ae;
  std::vector<FittedModel> ensemble;

  Fixture() {
    AbruptConfig cfg;
    cfg.segments = {{SegmentKind::Normal, 1600}, {SegmentKind::Fault, 400}};
    cfg.seed = 1;
    data = as_reconstruction(gen_abrupt(cfg));
    plan = build_plan(2000, 400, 40);
    AutoencoderConfig a;
    a.layer_dims = {40, 32, 16, 32, 40};
    a.epochs = 5;
    a.batch_size = 32;
    ae.variant = a;
    ensemble = train_ensemble(data, plan, pca, 0, Execution::Serial);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Execution exec_of(const benchmark::State& s) {
  return s.range(0) ? Execution::Parallel : Execution::Serial;
}

void BM_TrainEnsemblePca(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(train_ensemble(f.data, f.plan, f.pca, 0, exec_of(state)));
}

void BM_TrainEnsembleAutoencoder(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(train_ensemble(f.data, f.plan, f.ae, 0, exec_of(state)));
}

void BM_ResidualMatrix(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(residual_matrix(f.data, f.plan, f.ensemble, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_TrainEnsemblePca)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainEnsembleAutoencoder)
    ->ArgName("parallel")
    ->Arg(0)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualMatrix)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
