#include "cosmicbell/signif.hpp"

#include <benchmark/benchmark.h>

using namespace cosmicbell::signif;

namespace {

// Pair-1-like setting frequencies and predictabilities.
const std::array<double, 4> kQ{0.148, 0.276, 0.201, 0.375};
const std::array<double, 4> kEps{0.2095, 0.1783, 0.1987, 0.1676};

void BM_MemoryBoundCommitted(benchmark::State& state) {
    const auto d = StepDistribution::from(kQ, kEps);
    MemoryBoundOptions o;
    o.n_max = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(memory_bound(d, o));
}
BENCHMARK(BM_MemoryBoundCommitted)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_MemoryBoundAdaptive(benchmark::State& state) {
    const auto d = StepDistribution::from(kQ, kEps);
    MemoryBoundOptions o;
    o.n_max = static_cast<int>(state.range(0));
    o.model = PlanModel::adaptive;
    for (auto _ : state) benchmark::DoNotOptimize(memory_bound(d, o));
}
BENCHMARK(BM_MemoryBoundAdaptive)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
