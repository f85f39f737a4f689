#include "cosmicbell/events.hpp"
#include "cosmicbell/sim.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace cosmicbell;

namespace {

const sim::SimResult& session() {
    static const sim::SimResult s = [] {
        auto c = sim::SimConfig::pair1_defaults();
        c.mode = sim::GenerationMode::full;
        c.duration_s = 10;
        c.pair_rate_cps = 5e4;
        c.target_trials.reset();
        return sim::simulate_trials(c);
    }();
    return s;
}

void BM_ReadBinary(benchmark::State& state) {
    const auto path = (std::filesystem::temp_directory_path() / "cosmicbell_bench_events.bin").string();
    events::write_events_binary(path, session().events);
    for (auto _ : state) benchmark::DoNotOptimize(events::read_events(path));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * session().events.size()));
    std::filesystem::remove(path);
}
BENCHMARK(BM_ReadBinary)->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
    const auto streams = events::split_streams(session().events);
    auto c = sim::SimConfig::pair1_defaults();
    events::PipelineOptions o;
    o.delays_a = c.delays_a;
    o.delays_b = c.delays_b;
    o.tau_valid_a_us = c.tau_valid_a_us;
    o.tau_valid_b_us = c.tau_valid_b_us;
    for (auto _ : state) benchmark::DoNotOptimize(events::run_pipeline(streams, o));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * session().events.size()));
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

void BM_Coincidences(benchmark::State& state) {
    const auto streams = events::split_streams(session().events);
    for (auto _ : state) benchmark::DoNotOptimize(events::find_coincidences(streams.a.pol, streams.b.pol, events::DriftModel{}));
    state.SetItemsProcessed(
        static_cast<std::int64_t>(state.iterations() * (streams.a.pol.size() + streams.b.pol.size())));
}
BENCHMARK(BM_Coincidences)->Unit(benchmark::kMillisecond);

}  // namespace
