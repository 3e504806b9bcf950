#include "loratk/radio.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace loratk {

namespace {

bool needs_low_dr_opt(int sf, int bw_hz) {
    return (sf == 11 || sf == 12) && bw_hz == 125000;
}

}  // namespace

RadioConfig RadioConfig::lorawan(int sf, int bw_hz, int cr, int n_preamble) {
    RadioConfig cfg;
    cfg.sf = sf;
    cfg.bw_hz = bw_hz;
    cfg.cr = cr;
    cfg.n_preamble = n_preamble;
    cfg.header_disabled = false;
    cfg.low_dr_opt = needs_low_dr_opt(sf, bw_hz);
    cfg.validate();
    return cfg;
}

void RadioConfig::validate() const {
    if (sf < 7 || sf > 12)
        throw std::invalid_argument("spreading factor must be in 7..12, got " +
                                    std::to_string(sf));
    if (bw_hz <= 0)
        throw std::invalid_argument("bandwidth must be positive, got " +
                                    std::to_string(bw_hz));
    if (cr < 1 || cr > 4)
        throw std::invalid_argument("coding-rate index must be in 1..4, got " +
                                    std::to_string(cr));
    if (n_preamble < 0)
        throw std::invalid_argument("preamble length must be non-negative");
    if (low_dr_opt != needs_low_dr_opt(sf, bw_hz))
        throw std::invalid_argument(
            "low data-rate optimization must be enabled exactly for SF11/SF12 "
            "at 125 kHz");
}

RegionPlan RegionPlan::eu868() {
    RegionPlan plan;
    plan.channels_hz = {868100000, 868300000, 868500000};
    plan.duty_cycle = 0.01;
    plan.max_tx_dbm = 14;
    plan.max_payload_by_sf = {{7, 230}, {8, 230}, {9, 123},
                              {10, 59}, {11, 59}, {12, 59}};
    return plan;
}

double symbol_time(const RadioConfig& cfg) {
    return std::ldexp(1.0, cfg.sf) / cfg.bw_hz;
}

double preamble_time(const RadioConfig& cfg) {
    return (cfg.n_preamble + 4.25) * symbol_time(cfg);
}

int payload_symbols(const RadioConfig& cfg, int pl_bytes) {
    if (pl_bytes < 0) throw std::invalid_argument("payload length must be >= 0");
    const int h = cfg.header_disabled ? 1 : 0;
    const int de = cfg.low_dr_opt ? 1 : 0;
    const int num = 8 * pl_bytes - 4 * cfg.sf + 28 + 16 - 20 * h;
    const int den = 4 * (cfg.sf - 2 * de);
    // ceil(num/den) for possibly negative num, positive den
    const int beta = num > 0 ? (num + den - 1) / den : num / den;
    return std::max(beta * (cfg.cr + 4), 0) + 8;
}

double frame_airtime(const RadioConfig& cfg, int pl_bytes) {
    cfg.validate();
    return preamble_time(cfg) + payload_symbols(cfg, pl_bytes) * symbol_time(cfg);
}

long frames_per_day(const RadioConfig& cfg, int pl_bytes, const RegionPlan& plan) {
    auto cap = plan.max_payload_by_sf.find(cfg.sf);
    if (cap != plan.max_payload_by_sf.end() && pl_bytes > cap->second)
        throw std::invalid_argument(
            "payload of " + std::to_string(pl_bytes) + " bytes exceeds SF" +
            std::to_string(cfg.sf) + " limit of " + std::to_string(cap->second) +
            " bytes");
    const double budget_s = 86400.0 * plan.duty_cycle;
    return static_cast<long>(std::floor(budget_s / frame_airtime(cfg, pl_bytes)));
}

long data_per_day(const RadioConfig& cfg, int pl_bytes, const RegionPlan& plan) {
    return frames_per_day(cfg, pl_bytes, plan) * pl_bytes;
}

const std::vector<DataRateRow>& eu868_data_rates() {
    static const std::vector<DataRateRow> rows = [] {
        std::vector<DataRateRow> t = {
            {0, Modulation::Lora, 12, 125000, 250},
            {1, Modulation::Lora, 11, 125000, 440},
            {2, Modulation::Lora, 10, 125000, 980},
            {3, Modulation::Lora, 9, 125000, 1760},
            {4, Modulation::Lora, 8, 125000, 3125},
            {5, Modulation::Lora, 7, 125000, 5470},
            {6, Modulation::Lora, 7, 250000, 11000},
            {7, Modulation::Fsk, 0, 0, 50000},
        };
        for (int dr = 8; dr <= 15; ++dr) t.push_back({dr, Modulation::Rfu, 0, 0, 0});
        return t;
    }();
    return rows;
}

int indicative_bitrate(const RadioConfig& cfg) {
    for (const auto& row : eu868_data_rates()) {
        if (row.modulation == Modulation::Lora && row.sf == cfg.sf &&
            row.bw_hz == cfg.bw_hz)
            return row.bitrate_bps;
    }
    throw std::invalid_argument("no LoRa data-rate for SF" + std::to_string(cfg.sf) +
                                " / " + std::to_string(cfg.bw_hz) + " Hz");
}

}  // namespace loratk
