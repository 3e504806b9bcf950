#ifndef LORATK_TRACE_HPP
#define LORATK_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loratk/codec.hpp"
#include "loratk/pathloss.hpp"

namespace loratk {

/// One gateway's report of one received frame.
struct ReceptionRecord {
    std::string gateway_id;
    std::int64_t time_ms = 0;  // unix epoch milliseconds
    long freq_hz = 0;
    int sf = 7;
    int bw_hz = 125000;
    double rssi_dbm = 0.0;
    double snr_db = 0.0;
    std::vector<std::uint8_t> payload;
    std::optional<GeoPoint> gateway_location;
};

struct IngestResult {
    std::vector<ReceptionRecord> records;
    std::size_t skipped = 0;
};

std::string base64_encode(std::span<const std::uint8_t> data);
/// Throws std::invalid_argument on non-base64 input.
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Reads line-delimited JSON records. Malformed lines are counted and
/// skipped; an unreadable stream throws std::runtime_error.
IngestResult ingest(std::istream& in);

/// Parses one ISO-8601 timestamp with milliseconds ("2016-05-01T12:00:00.123Z")
/// to unix epoch milliseconds. Throws std::invalid_argument on bad input.
std::int64_t parse_iso8601_ms(const std::string& text);
std::string format_iso8601_ms(std::int64_t time_ms);

/// Receptions of the same frame seen by multiple gateways.
struct UniqueFrame {
    bool parseable = false;
    std::uint32_t dev_addr = 0;
    std::uint16_t fcnt = 0;
    std::vector<std::uint8_t> payload;  // raw PHY payload bytes
    std::vector<ReceptionRecord> receptions;
};

/// Groups receptions whose DevAddr, FCnt, and payload match and whose
/// timestamps fall within window_s of the group's earliest reception.
/// Unparseable payloads are grouped by their raw bytes.
std::vector<UniqueFrame> deduplicate(const std::vector<ReceptionRecord>& records,
                                     double window_s = 5.0);

enum class Metric { Rssi, Snr, PayloadSize, Sf, Freq, FramesPerDevice, DistanceError };

Metric metric_from_name(const std::string& name);
std::string metric_name(Metric metric);

struct HistogramBin {
    double lower;
    double upper;  // equal to lower for categorical bins
    std::uint64_t count;
};

struct Histogram {
    Metric metric;
    std::vector<HistogramBin> bins;
    std::uint64_t total = 0;
    bool pdf = false;

    /// Normalized share of one bin; only meaningful in pdf mode.
    double density(std::size_t i) const {
        return total == 0 ? 0.0 : static_cast<double>(bins[i].count) / total;
    }
};

struct Binning {
    double width = 1.0;  // continuous metrics
    bool pdf = false;
    double dedup_window_s = 5.0;  // used by frames-per-device grouping
};

/// Histogram of one metric over the records. PayloadSize, Sf, and Freq are
/// categorical; Rssi/Snr use fixed-width bins; FramesPerDevice uses powers
/// of two (the per-device frame counts follow a power law).
/// Throws std::invalid_argument on empty input in pdf mode.
Histogram histogram(const std::vector<ReceptionRecord>& records, Metric metric,
                    const Binning& binning = {});

enum class PayloadClass {
    LoRaMote,
    CommaSeparatedDecimals,
    Temperature,
    Humidity,
    GpsLocation,
    BatteryLevel,
    Brightness,
    Distance,
    KnownString,
    OtherReadable,
    Binary,
};

struct PayloadClassification {
    PayloadClass cls;
    std::string label;  // the matched keyword for KnownString
};

std::string payload_class_name(const PayloadClassification& c);

/// Version tag of the classification rule cascade, recorded in CSV metadata.
inline constexpr const char* kClassifierVersion = "rules-v1";

/// First-match rule cascade over a decrypted payload; total and deterministic.
PayloadClassification classify_payload(std::span<const std::uint8_t> plaintext,
                                       std::optional<std::uint8_t> fport = {});

/// Lat/lon parsed from a "52.0116,4.3571"-style payload, when it is one.
std::optional<GeoPoint> parse_gps_payload(std::span<const std::uint8_t> plaintext);

struct DistanceErrorReport {
    Histogram histogram;        // signed error, 1 m bins
    std::uint64_t receptions_used = 0;
    std::uint64_t skipped_no_gateway_location = 0;
    std::uint64_t skipped_no_gps_payload = 0;
    std::uint64_t out_of_range = 0;
};

/// Estimated-minus-measured distance per reception, for frames whose payload
/// decodes (generic key) to a GPS position and whose gateway has a location.
DistanceErrorReport distance_error_report(const std::vector<UniqueFrame>& frames,
                                          double range_lo_m = -100.0,
                                          double range_hi_m = 100.0);

struct TraceSummary {
    std::uint64_t receptions = 0;
    std::uint64_t unique_frames = 0;
    std::uint64_t unique_devices = 0;
    std::uint64_t gateways = 0;
    double dedup_window_s = 5.0;
    // how many unique frames were seen by k gateways
    std::map<std::uint64_t, std::uint64_t> reception_count_distribution;
};

TraceSummary summary(const std::vector<ReceptionRecord>& records,
                     double dedup_window_s = 5.0);

}  // namespace loratk

#endif
