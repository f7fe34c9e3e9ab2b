#include <benchmark/benchmark.h>

#include <omp.h>

#include "htp/hankel.hpp"
#include "htp/parallel.hpp"
#include "htp/verify.hpp"

namespace {

const htp::SampledFunction& input() {
  static const htp::SampledFunction f = htp::SampledFunction::bump(2.0, 0.8);
  return f;
}

// Parallel Gauss-panel kernel; the argument is the worker count.
void BM_HankelParallel(benchmark::State& state) {
  htp::set_worker_count(static_cast<int>(state.range(0)));
  const auto x = htp::linspace(0.1, 8.0, 64);
  for (auto _ : state) benchmark::DoNotOptimize(htp::hankel_transform(2.0, input(), x));
  htp::set_worker_count(0);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}

// Serial adaptive reference on the same grid.
void BM_HankelReference(benchmark::State& state) {
  const auto x = htp::linspace(0.1, 8.0, 64);
  for (auto _ : state) benchmark::DoNotOptimize(htp::hankel_transform_reference(2.0, input(), x));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}

void BM_KernelScan(benchmark::State& state) {
  htp::set_worker_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(htp::cz_size_scan(0.0, 0.7, 10, 17));
  htp::set_worker_count(0);
}

void worker_args(benchmark::internal::Benchmark* b) {
  const int most = omp_get_num_procs();
  b->Arg(1);
  if (most > 1) b->Arg(most);
}

}  // namespace

BENCHMARK(BM_HankelParallel)->Apply(worker_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HankelReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelScan)->Apply(worker_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
