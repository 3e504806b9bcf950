#include <benchmark/benchmark.h>

#include "loratk/codec.hpp"

namespace {

std::vector<std::uint8_t> sample_frame() {
    loratk::PhyFrame f;
    f.mhdr = 0x40;
    f.dev_addr = 0x26011425;
    f.fcnt = 1;
    f.fport = 1;
    f.frm_payload = loratk::frm_payload_crypt(
        std::vector<std::uint8_t>{'h', 'e', 'l', 'l', 'o'}, loratk::generic_key(),
        f.dev_addr, f.fcnt, false);
    f.mic = loratk::compute_mic(f, loratk::generic_key());
    return loratk::serialize(f);
}

void BM_DecodeGeneric(benchmark::State& state) {
    const auto raw = sample_frame();
    for (auto _ : state)
        benchmark::DoNotOptimize(loratk::decode_generic(raw));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DecodeGeneric);

void BM_ParseOnly(benchmark::State& state) {
    const auto raw = sample_frame();
    for (auto _ : state)
        benchmark::DoNotOptimize(loratk::parse_phy_payload(raw));
}
BENCHMARK(BM_ParseOnly);

}  // namespace

BENCHMARK_MAIN();
