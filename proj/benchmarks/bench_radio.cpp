#include <benchmark/benchmark.h>

#include "loratk/radio.hpp"

namespace {

void BM_FrameAirtime(benchmark::State& state) {
    const auto cfg = loratk::RadioConfig::lorawan(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        for (int pl = 0; pl <= 59; ++pl)
            benchmark::DoNotOptimize(loratk::frame_airtime(cfg, pl));
    }
    state.SetItemsProcessed(state.iterations() * 60);
}
BENCHMARK(BM_FrameAirtime)->Arg(7)->Arg(12);

void BM_FramesPerDay(benchmark::State& state) {
    const auto cfg = loratk::RadioConfig::lorawan(7);
    const auto plan = loratk::RegionPlan::eu868();
    for (auto _ : state)
        benchmark::DoNotOptimize(loratk::frames_per_day(cfg, 13, plan));
}
BENCHMARK(BM_FramesPerDay);

}  // namespace
