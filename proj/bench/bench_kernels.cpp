// Serial reference kernels against their OpenMP variants, and the two gradient routes.
//   bench_kernels --benchmark_filter=Factor
// Thread count for the parallel variants comes from TOPICNET_THREADS (0 = OpenMP default).

#include <benchmark/benchmark.h>

#include "topicnet/estimator_known.hpp"
#include "topicnet/kernels.hpp"
#include "topicnet/synthgen.hpp"

namespace {

using namespace topicnet;

SynthInstance instance(benchmark::State& state) {
  SynthSpec s;
  s.p = state.range(0);
  s.K = state.range(1);
  s.n = 200;
  s.seed = 1;
  return gen_instance(s);
}

int threads() { return Execution::from_environment().threads; }

void BM_FactorResidualsSerial(benchmark::State& state) {
  const SynthInstance inst = instance(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(factor_residuals_serial(inst.truth, inst.dataset, inst.topics));
  }
}

void BM_FactorResidualsParallel(benchmark::State& state) {
  const SynthInstance inst = instance(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(factor_residuals_parallel(inst.truth, inst.dataset, inst.topics, threads()));
  }
}

void BM_ThetaResidualsSerial(benchmark::State& state) {
  const SynthInstance inst = instance(state);
  const ThetaStack thetas = thetas_from_factors(inst.truth);
  for (auto _ : state) {
    benchmark::DoNotOptimize(theta_residuals_serial(thetas, inst.dataset, inst.topics));
  }
}

void BM_ThetaResidualsParallel(benchmark::State& state) {
  const SynthInstance inst = instance(state);
  const ThetaStack thetas = thetas_from_factors(inst.truth);
  for (auto _ : state) {
    benchmark::DoNotOptimize(theta_residuals_parallel(thetas, inst.dataset, inst.topics, threads()));
  }
}

void BM_TopicMomentsSerial(benchmark::State& state) {
  const SynthInstance inst = instance(state);
  for (auto _ : state) benchmark::DoNotOptimize(topic_moments_serial(inst.dataset, inst.topics));
}

void BM_TopicMomentsParallel(benchmark::State& state) {
  const SynthInstance inst = instance(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(topic_moments_parallel(inst.dataset, inst.topics, threads()));
  }
}

void BM_GradientPerObservation(benchmark::State& state) {
  const SynthInstance inst = instance(state);
  const FactorObjective obj(inst.dataset, inst.topics, GradientRoute::per_observation);
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(inst.truth));
}

void BM_GradientMoments(benchmark::State& state) {
  const SynthInstance inst = instance(state);
  const FactorObjective obj(inst.dataset, inst.topics, GradientRoute::moments);
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(inst.truth));
}

void grid(benchmark::internal::Benchmark* b) {
  for (int p : {50, 100}) {
    for (int k : {5, 10}) b->Args({p, k});
  }
  b->ArgNames({"p", "K"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_FactorResidualsSerial)->Apply(grid);
BENCHMARK(BM_FactorResidualsParallel)->Apply(grid);
BENCHMARK(BM_ThetaResidualsSerial)->Apply(grid);
BENCHMARK(BM_ThetaResidualsParallel)->Apply(grid);
BENCHMARK(BM_TopicMomentsSerial)->Apply(grid);
BENCHMARK(BM_TopicMomentsParallel)->Apply(grid);
BENCHMARK(BM_GradientPerObservation)->Apply(grid);
BENCHMARK(BM_GradientMoments)->Apply(grid);

BENCHMARK_MAIN();
