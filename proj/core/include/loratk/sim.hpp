#ifndef LORATK_SIM_HPP
#define LORATK_SIM_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "loratk/radio.hpp"

namespace loratk {

/// Deterministic RNG used by the simulator. Draw mapping is hand-rolled so
/// identical seeds give identical streams on every platform.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    /// Uniform double in [0, 1).
    double next_double();
    /// Uniform index in [0, n).
    std::size_t next_index(std::size_t n);
    /// Bernoulli with probability p.
    bool next_chance(double p);

private:
    std::uint64_t state_;
};

struct SimConfig {
    int packets_per_window = 0;
    double window_s = 60.0;
    int payload_bytes = 1;
    int overhead_bytes = 13;
    double confirmed_fraction = 0.0;
    double rx1_delay_s = 1.0;
    double duty_cycle = 0.01;
    std::vector<int> channels_hz = {868100000, 868300000, 868500000};
    std::vector<int> sfs = {7, 8, 9, 10, 11, 12};
    std::uint64_t seed = 1;
    int trials = 1;

    void validate() const;
};

enum class Direction { Uplink, DownlinkAck };

enum class Fate { Delivered, Collided, LostGatewayBusy, AckDropped };

struct TransmissionEvent {
    double start_s = 0.0;
    double airtime_s = 0.0;
    int channel_hz = 0;
    int sf = 0;
    Direction direction = Direction::Uplink;
    bool wants_ack = false;
    Fate fate = Fate::Delivered;

    double end_s() const { return start_s + airtime_s; }
};

struct SfStats {
    std::uint64_t uplinks = 0;
    std::uint64_t collided = 0;

    double collision_rate() const {
        return uplinks == 0 ? 0.0 : static_cast<double>(collided) / uplinks;
    }
};

/// Aggregated outcome over all simulated windows.
struct SimReport {
    int windows = 0;
    std::map<int, SfStats> per_sf;
    std::uint64_t uplinks = 0;
    std::uint64_t delivered = 0;
    std::uint64_t collided = 0;
    std::uint64_t lost_gateway_busy = 0;
    std::uint64_t acks_sent = 0;
    std::uint64_t acks_dropped = 0;
    double gateway_tx_time_s = 0.0;  // mean per window
    double gateway_airtime_fraction = 0.0;
    bool duty_violation = false;

    double overall_loss_rate() const {
        return uplinks == 0
                   ? 0.0
                   : static_cast<double>(collided + lost_gateway_busy) / uplinks;
    }
};

/// Draws one window of uplink traffic: start times uniform over [0, window),
/// SF and channel uniform over the configured sets, wants_ack Bernoulli.
std::vector<TransmissionEvent> generate_traffic(const SimConfig& cfg, SimRng& rng);

/// Marks two uplinks Collided when their on-air intervals overlap on the same
/// channel and SF (no capture effect); everything else stays Delivered.
void detect_collisions(std::vector<TransmissionEvent>& uplinks);

/// Unconfirmed-only collision simulation; requires confirmed_fraction == 0.
SimReport simulate_uplink_collisions(const SimConfig& cfg);

/// Full pipeline with downlink ACKs, half-duplex gateway losses, and
/// gateway duty-cycle accounting.
SimReport simulate_with_confirmations(const SimConfig& cfg);

struct SweepPoint {
    int packets_per_window;
    double confirmed_fraction;
    SimReport report;
};

/// Runs simulate_with_confirmations over the (n, p) grid; each point gets a
/// seed derived deterministically from the base seed and grid index.
std::vector<SweepPoint> sweep(const SimConfig& base,
                              const std::vector<int>& packet_counts,
                              const std::vector<double>& confirmed_fractions);

}  // namespace loratk

#endif
