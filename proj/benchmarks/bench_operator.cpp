#include <benchmark/benchmark.h>

#include "ctfl/cantor.hpp"
#include "ctfl/experiments.hpp"
#include "ctfl/localization.hpp"

namespace {

void BM_ContinuousIterate(benchmark::State& state) {
    const ctfl::CantorSpec spec(3, {0, 2});
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ctfl::continuous_iterate(spec, n, 1.0));
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_ContinuousIterate)->Arg(8)->Arg(14)->Arg(18);

// Whole table up to k = 2 rho on the middle-thirds iterate at rho = 3^{n/2}.
void BM_EigenvalueTable(benchmark::State& state) {
    const ctfl::CantorSpec spec(3, {0, 2});
    const int n = static_cast<int>(state.range(0));
    const double rho = ctfl::RadiusSchedule::power_half().rho(3, n);
    const auto p = ctfl::LocalizationProblem::fixed(spec, n, rho);
    for (auto _ : state) benchmark::DoNotOptimize(ctfl::eigenvalue_table(p, static_cast<int>(2 * rho) + 10));
}
BENCHMARK(BM_EigenvalueTable)->Arg(4)->Arg(8)->Arg(12);

void BM_EigenvalueSegmentSum(benchmark::State& state) {
    const ctfl::CantorSpec spec(3, {0, 2});
    const int n = static_cast<int>(state.range(0));
    const double rho = ctfl::RadiusSchedule::power_half().rho(3, n);
    const auto p = ctfl::LocalizationProblem::fixed(spec, n, rho);
    const int k = static_cast<int>(rho);
    for (auto _ : state) benchmark::DoNotOptimize(ctfl::eigenvalue(p, k));
}
BENCHMARK(BM_EigenvalueSegmentSum)->Arg(4)->Arg(8)->Arg(12);

void BM_OperatorNorm(benchmark::State& state) {
    const ctfl::CantorSpec spec(5, {0, 1, 2});
    const int n = static_cast<int>(state.range(0));
    const double rho = ctfl::RadiusSchedule::power_half().rho(5, n);
    const auto p = ctfl::LocalizationProblem::fixed(spec, n, rho);
    for (auto _ : state) benchmark::DoNotOptimize(ctfl::operator_norm(p));
}
BENCHMARK(BM_OperatorNorm)->Arg(4)->Arg(6)->Arg(8);

void BM_Lambda0Indexed(benchmark::State& state) {
    const auto levels = ctfl::positive_measure_levels(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ctfl::lambda0_indexed(levels, 2.0));
}
BENCHMARK(BM_Lambda0Indexed)->Arg(12)->Arg(40);

void BM_CantorFunction(benchmark::State& state) {
    const ctfl::CantorSpec spec(3, {0, 2});
    double x = 0.123456789;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctfl::cantor_function(spec, 40, x));
        x = x < 0.9 ? x + 1e-7 : 0.1;
    }
}
BENCHMARK(BM_CantorFunction);

}  // namespace
