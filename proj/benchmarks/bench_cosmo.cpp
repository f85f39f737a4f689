#include "cosmicbell/cosmo.hpp"

#include <benchmark/benchmark.h>

using namespace cosmicbell::cosmo;

namespace {

void BM_TableBuild(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(Cosmology{});
}
BENCHMARK(BM_TableBuild)->Unit(benchmark::kMillisecond);

void BM_ExcludedFraction(benchmark::State& state) {
    const Cosmology c;
    double z = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(c.excluded_fraction(z, 3.9, 100.0));
        z = z > 4 ? 0.5 : z + 0.01;
    }
}
BENCHMARK(BM_ExcludedFraction)->Unit(benchmark::kMicrosecond);

void BM_LookbackTime(benchmark::State& state) {
    const CosmologyParams p;
    double z = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lookback_time_of_z(z, p));
        z = z > 10 ? 0.1 : z * 1.01;
    }
}
BENCHMARK(BM_LookbackTime);

}  // namespace
