// Serial reference against the OpenMP sweep on the same band.
#include <benchmark/benchmark.h>

#include <cmath>

#include "ktorus/certifier.hpp"

using namespace ktorus;

namespace {

const FProfile& clifton_pohl() {
    static const FProfile p = build_profile(Expression::parse("sin(2*x)"), M_PI);
    return p;
}

void BM_SweepSerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto r = band_sweep(clifton_pohl(), 0, n, Exec::Serial);
        benchmark::DoNotOptimize(r.min_z0);
    }
    state.SetItemsProcessed(state.iterations() * 2 * n);
}

void BM_SweepParallel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto r = band_sweep(clifton_pohl(), 0, n, Exec::Parallel);
        benchmark::DoNotOptimize(r.min_z0);
    }
    state.SetItemsProcessed(state.iterations() * 2 * n);
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
