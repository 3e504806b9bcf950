#include <benchmark/benchmark.h>

#include "loratk/sim.hpp"

namespace {

void BM_DetectCollisions(benchmark::State& state) {
    loratk::SimConfig cfg;
    cfg.packets_per_window = static_cast<int>(state.range(0));
    loratk::SimRng rng(7);
    auto events = loratk::generate_traffic(cfg, rng);
    for (auto _ : state) {
        auto copy = events;
        loratk::detect_collisions(copy);
        benchmark::DoNotOptimize(copy);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetectCollisions)->Arg(100)->Arg(1000)->Arg(5000);

void BM_SimulateWindow(benchmark::State& state) {
    loratk::SimConfig cfg;
    cfg.packets_per_window = static_cast<int>(state.range(0));
    cfg.confirmed_fraction = 0.01;
    cfg.trials = 1;
    for (auto _ : state) {
        cfg.seed++;
        benchmark::DoNotOptimize(loratk::simulate_with_confirmations(cfg));
    }
}
BENCHMARK(BM_SimulateWindow)->Arg(200)->Arg(1000);

}  // namespace
