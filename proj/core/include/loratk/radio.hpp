#ifndef LORATK_RADIO_HPP
#define LORATK_RADIO_HPP

#include <cstdint>
#include <map>
#include <vector>

namespace loratk {

/// PHY parameters of one LoRa transmission.
///
/// cr is the coding-rate index: 1 stands for rate 4/5, 4 for rate 4/8.
/// low_dr_opt (DE) must be set for SF11/SF12 at 125 kHz; header_disabled (H)
/// stays false for LoRaWAN frames.
struct RadioConfig {
    int sf = 7;
    int bw_hz = 125000;
    int cr = 1;
    int n_preamble = 8;
    bool header_disabled = false;
    bool low_dr_opt = false;

    /// Builds a validated LoRaWAN uplink config; DE is derived from sf/bw.
    /// Throws std::invalid_argument on out-of-range parameters.
    static RadioConfig lorawan(int sf, int bw_hz = 125000, int cr = 1,
                               int n_preamble = 8);

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

/// Regional channel plan and regulatory limits. Duty-cycle accounting is per
/// channel, not per ETSI sub-band.
struct RegionPlan {
    std::vector<int> channels_hz;
    double duty_cycle = 0.01;
    int max_tx_dbm = 14;
    std::map<int, int> max_payload_by_sf;

    static RegionPlan eu868();
};

/// Symbol duration in seconds: 2^SF / BW.
double symbol_time(const RadioConfig& cfg);

/// Preamble duration in seconds: (n_preamble + 4.25) symbols.
double preamble_time(const RadioConfig& cfg);

/// Number of symbols carrying the PHY payload, including the 8-symbol floor.
int payload_symbols(const RadioConfig& cfg, int pl_bytes);

/// Time on air of a whole frame in seconds.
double frame_airtime(const RadioConfig& cfg, int pl_bytes);

/// Frames a node may send per day on one channel under the plan's duty cycle.
/// Throws std::invalid_argument when pl_bytes exceeds the SF's payload cap.
long frames_per_day(const RadioConfig& cfg, int pl_bytes, const RegionPlan& plan);

/// Bytes per day per channel: frames_per_day * pl_bytes.
long data_per_day(const RadioConfig& cfg, int pl_bytes, const RegionPlan& plan);

/// Modulation of an EU868 data-rate table row.
enum class Modulation { Lora, Fsk, Rfu };

struct DataRateRow {
    int dr;
    Modulation modulation;
    int sf;     // 0 when not LoRa
    int bw_hz;  // 0 when not LoRa
    int bitrate_bps;
};

/// The EU 863-870 MHz data-rate table, rows DR0..DR15 (DR7 FSK, DR8+ reserved).
const std::vector<DataRateRow>& eu868_data_rates();

/// Indicative physical bit rate for a LoRa configuration (DR0..DR6).
/// Throws std::invalid_argument for configurations outside the LoRa rows.
int indicative_bitrate(const RadioConfig& cfg);

}  // namespace loratk

#endif
