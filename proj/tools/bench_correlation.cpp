// Serial reference against the OpenMP correlation-matrix kernels.
//
//   bench_correlation --benchmark_filter=N:80

#include <benchmark/benchmark.h>

#include "qdcca/pipeline.hpp"
#include "qdcca/spectra.hpp"
#include "qdcca/synth.hpp"

namespace {

qdcca::ReturnMatrix returns(std::size_t n, std::size_t t) {
  qdcca::GeneratorSpec spec;
  spec.kind = qdcca::Generator::kFactor;
  spec.assets = n;
  spec.length = t;
  return qdcca::synth_returns(spec, 1);
}

void Serial(benchmark::State& state) {
  const auto r = returns(static_cast<std::size_t>(state.range(0)), 10080);
  for (auto _ : state) {
    for (double q : {1.0, 4.0})
      benchmark::DoNotOptimize(qdcca::correlation_matrix_serial(r, {10, 2, q}));
  }
}

void Parallel(benchmark::State& state) {
  const auto r = returns(static_cast<std::size_t>(state.range(0)), 10080);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    for (double q : {1.0, 4.0})
      benchmark::DoNotOptimize(qdcca::correlation_matrix(r, {10, 2, q}, threads));
  }
}

void SharedQ(benchmark::State& state) {
  const auto r = returns(static_cast<std::size_t>(state.range(0)), 10080);
  const int threads = static_cast<int>(state.range(1));
  const double qs[] = {1.0, 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(qdcca::correlation_matrices(r, 10, 2, qs, threads));
}

void FullWindow(benchmark::State& state) {
  const auto r = returns(80, 10080);
  qdcca::AnalysisConfig cfg;
  cfg.q = {1.0, 4.0};
  cfg.s = {10};
  cfg.anchors = {"A01", "A02"};
  cfg.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qdcca::run_analysis(cfg, r));
}

}  // namespace

BENCHMARK(Serial)->ArgNames({"N"})->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(Parallel)->ArgNames({"N", "threads"})->ArgsProduct({{20, 80}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(SharedQ)->ArgNames({"N", "threads"})->ArgsProduct({{20, 80}, {1, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(FullWindow)->ArgNames({"threads"})->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
