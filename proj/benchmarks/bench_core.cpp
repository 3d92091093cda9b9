#include <benchmark/benchmark.h>

#include "ssmix/ecm.hpp"
#include "ssmix/metrics.hpp"
#include "ssmix/simulate.hpp"

using namespace ssmix;

namespace {

Dataset bench_dataset(long n) {
  SimSpec spec = SimSpec::defaults(Family::gaussian);
  spec.n = n;
  spec.seed = 99;
  return apply_mar_deletion(simulate(spec), AoParams{0.0, -4.0, 1.0},
                            moment_matched_mixture(spec), 0.7);
}

void BM_Responsibilities(benchmark::State& state) {
  const Dataset ds = bench_dataset(state.range(0));
  const MixtureParams theta = moment_matched_mixture(SimSpec::defaults(Family::gaussian));
  for (auto _ : state) {
    benchmark::DoNotOptimize(responsibilities(ds.features, theta));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Responsibilities)->Arg(1000)->Arg(10000);

void BM_FullLoglik(benchmark::State& state) {
  const Dataset ds = bench_dataset(state.range(0));
  FullParams params{moment_matched_mixture(SimSpec::defaults(Family::gaussian)),
                    AoParams{0.5, -3.0, 1.0}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(full_loglik(ds, params));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FullLoglik)->Arg(1000)->Arg(10000);

void BM_ThetaGradient(benchmark::State& state) {
  const Dataset ds = bench_dataset(state.range(0));
  FullParams params{moment_matched_mixture(SimSpec::defaults(Family::gaussian)),
                    AoParams{0.5, -3.0, 1.0}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(cm_step_theta_gradient(ds, params));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ThetaGradient)->Arg(1000)->Arg(10000);

void BM_EcmIteration(benchmark::State& state) {
  const Dataset ds = bench_dataset(2000);
  EcmConfig config;
  config.max_iters = 1;
  config.lambda_estimated = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(ds, config));
  }
}
BENCHMARK(BM_EcmIteration);

void BM_RocAuc(benchmark::State& state) {
  const Dataset ds = bench_dataset(state.range(0));
  const MixtureParams theta = moment_matched_mixture(SimSpec::defaults(Family::gaussian));
  const Eigen::VectorXd scores = responsibilities(ds.features, theta).tau.col(0);
  std::vector<int> truth(ds.n());
  for (long j = 0; j < ds.n(); ++j) truth[j] = ds.true_labels[j] == 1 ? 1 : 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(roc_and_auc(scores, truth));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
