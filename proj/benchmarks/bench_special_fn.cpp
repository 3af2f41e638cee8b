#include <benchmark/benchmark.h>

#include "ctfl/special_fn.hpp"

namespace {

void BM_RegularizedLowerGamma(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    double x = 0.5 * k + 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctfl::regularized_lower_gamma(k, x));
        x += 1e-9;
    }
}
BENCHMARK(BM_RegularizedLowerGamma)->Arg(1)->Arg(40)->Arg(1000)->Arg(100000);

void BM_SegmentMass(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const double a = static_cast<double>(k);
    for (auto _ : state) benchmark::DoNotOptimize(ctfl::segment_mass(k, a, a + 0.25));
}
BENCHMARK(BM_SegmentMass)->Arg(0)->Arg(10)->Arg(1000);

// Thin tail segment, which takes the quadrature route.
void BM_SegmentMassThinTail(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(ctfl::log_segment_mass(4096, 8192.0, 8192.0 + 1e-3));
}
BENCHMARK(BM_SegmentMassThinTail);

}  // namespace
