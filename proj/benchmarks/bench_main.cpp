#include <benchmark/benchmark.h>

#include "potts/landscape.hpp"
#include "potts/simulator.hpp"

using namespace potts;

namespace {

// Gillespie event loop on a fixed horizon; reports events per second.
void BM_EventLoop(benchmark::State& state) {
    SimulationConfig c;
    c.params = {2.4, 0, 0};
    c.N = static_cast<int>(state.range(0));
    c.seed = 1;
    c.start_state = nearest_lattice({0.1, 0.1}, c.N);
    c.horizon = 1e5;
    const auto ctx = prepare_simulation(c);
    std::uint64_t events = 0, replica = 0;
    for (auto _ : state) {
        const auto t = run_trajectory(*ctx, replica++);
        events += t.events;
        benchmark::DoNotOptimize(t.final_state);
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_EventLoop)->Arg(60)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_RateTable(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state) {
        RateTable t(N, {2.4, 0.1, 1.0});
        benchmark::DoNotOptimize(t.size());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lattice_size(N)));
}
BENCHMARK(BM_RateTable)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CriticalPointsClosedForm(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(critical_points({2.4, 0.05, kPi}));
}
BENCHMARK(BM_CriticalPointsClosedForm)->Unit(benchmark::kMicrosecond);

void BM_CriticalPointsMultistart(benchmark::State& state) {
    const int grid = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(critical_points_multistart({2.4, 0.05, 1.0}, grid));
}
BENCHMARK(BM_CriticalPointsMultistart)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ClassifyRegime(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(classify_regime({1.9, 0, 0}));
}
BENCHMARK(BM_ClassifyRegime)->Unit(benchmark::kMillisecond);

void BM_ExactMeanHittingTime(benchmark::State& state) {
    SimulationConfig c;
    c.params = {2.4, 0, 0};
    c.N = static_cast<int>(state.range(0));
    c.start_valley = 0;
    const auto ctx = prepare_simulation(c);
    for (auto _ : state) benchmark::DoNotOptimize(exact_mean_hitting_time(*ctx));
}
BENCHMARK(BM_ExactMeanHittingTime)->Arg(60)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
