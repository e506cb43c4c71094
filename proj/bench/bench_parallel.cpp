// Serial reference against the OpenMP path for the two batch drivers.
// Run with DERHAM_THREADS=k to cap the parallel path.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "derham/parallel.hpp"
#include "derham/profiles.hpp"

using namespace derham;

namespace {

ThetaBump bench_theta(int n) {
  return make_tensor_bump(n, std::vector<Rational>(n, Rational(1, 4)), Rational(1, 2), 2);
}

void BM_homotopy_defect(benchmark::State& state, Execution mode) {
  const int n = static_cast<int>(state.range(0));
  const PoincareContext pc(bench_theta(n));
  for (auto _ : state) {
    const auto b = homotopy_defect_batch(pc, 1, 32, 4, 7, mode);
    benchmark::DoNotOptimize(b.nonzero);
  }
  state.counters["forms/s"] = benchmark::Counter(32.0, benchmark::Counter::kIsIterationInvariantRate);
}

void BM_bogovskii_T(benchmark::State& state, Execution mode) {
  const int n = static_cast<int>(state.range(0));
  const BogovskiiContext ctx(bench_theta(n));
  std::mt19937_64 rng(3);
  const SampledForm u = profile_form(radial_bump_field(std::vector<double>(n, 0.6), 0.5, 3), random_polyform(n, 1, 2, rng));
  const auto pts = kronecker_points(Box{std::vector<double>(n, -0.6), std::vector<double>(n, 1.2)}, 16);
  for (auto _ : state) {
    const auto v = bogovskii_T_batch(ctx, u, pts, mode);
    benchmark::DoNotOptimize(v.data());
  }
  state.counters["points/s"] = benchmark::Counter(16.0, benchmark::Counter::kIsIterationInvariantRate);
}

}  // namespace

BENCHMARK_CAPTURE(BM_homotopy_defect, serial, Execution::serial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_homotopy_defect, parallel, Execution::parallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_bogovskii_T, serial, Execution::serial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_bogovskii_T, parallel, Execution::parallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  omp_set_num_threads(thread_cap());
  benchmark::Initialize(&argc, argv);
  benchmark::AddCustomContext("threads", std::to_string(thread_cap()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
