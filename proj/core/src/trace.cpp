#include "loratk/trace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <regex>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace loratk {

namespace {

const char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < data.size(); i += 3) {
        std::uint32_t v = data[i] << 16;
        if (i + 1 < data.size()) v |= data[i + 1] << 8;
        if (i + 2 < data.size()) v |= data[i + 2];
        out.push_back(kB64Alphabet[(v >> 18) & 0x3F]);
        out.push_back(kB64Alphabet[(v >> 12) & 0x3F]);
        out.push_back(i + 1 < data.size() ? kB64Alphabet[(v >> 6) & 0x3F] : '=');
        out.push_back(i + 2 < data.size() ? kB64Alphabet[v & 0x3F] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0)
        throw std::invalid_argument("base64 length must be a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            char c = text[i + k];
            if (c == '=' && k >= 2 && i + 4 == text.size()) {
                vals[k] = 0;
                ++pad;
            } else {
                vals[k] = b64_value(c);
                if (vals[k] < 0 || pad > 0)
                    throw std::invalid_argument("invalid base64 input");
            }
        }
        std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
    return out;
}

std::int64_t parse_iso8601_ms(const std::string& text) {
    int y, mo, d, h, mi, s, ms = 0;
    char tail[8] = {0};
    int matched = std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3d%1s", &y,
                              &mo, &d, &h, &mi, &s, &ms, tail);
    if (matched < 7 || tail[0] != 'Z')
        throw std::invalid_argument("bad ISO-8601 timestamp: " + text);
    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    const time_t secs = timegm(&tm);
    if (secs == static_cast<time_t>(-1))
        throw std::invalid_argument("bad ISO-8601 timestamp: " + text);
    return static_cast<std::int64_t>(secs) * 1000 + ms;
}

std::string format_iso8601_ms(std::int64_t time_ms) {
    const time_t secs = static_cast<time_t>(time_ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec, static_cast<int>(time_ms % 1000));
    return buf;
}

IngestResult ingest(std::istream& in) {
    if (!in) throw std::runtime_error("trace input stream is not readable");
    IngestResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            ReceptionRecord rec;
            rec.gateway_id = j.at("gateway_id").get<std::string>();
            rec.time_ms = parse_iso8601_ms(j.at("time_utc").get<std::string>());
            rec.freq_hz = j.at("freq_hz").get<long>();
            rec.sf = j.at("sf").get<int>();
            rec.bw_hz = j.at("bw_hz").get<int>();
            rec.rssi_dbm = j.at("rssi_dbm").get<double>();
            rec.snr_db = j.at("snr_db").get<double>();
            rec.payload = base64_decode(j.at("payload_b64").get<std::string>());
            if (j.contains("gw_lat") && j.contains("gw_lon")) {
                GeoPoint p{j.at("gw_lat").get<double>(), j.at("gw_lon").get<double>()};
                p.validate();
                rec.gateway_location = p;
            }
            if (rec.sf < 7 || rec.sf > 12 || rec.freq_hz <= 0)
                throw std::invalid_argument("field out of range");
            result.records.push_back(std::move(rec));
        } catch (const std::exception&) {
            ++result.skipped;
        }
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading trace input");
    return result;
}

namespace {

std::string dedup_key(const ReceptionRecord& rec, bool& parseable,
                      std::uint32_t& dev_addr, std::uint16_t& fcnt) {
    parseable = false;
    try {
        const PhyFrame frame = parse_phy_payload(rec.payload);
        parseable = true;
        dev_addr = frame.dev_addr;
        fcnt = frame.fcnt;
        std::string key = "d:" + std::to_string(frame.dev_addr) + ":" +
                          std::to_string(frame.fcnt) + ":";
        key.append(frame.frm_payload.begin(), frame.frm_payload.end());
        return key;
    } catch (const CodecError&) {
        std::string key = "r:";
        key.append(rec.payload.begin(), rec.payload.end());
        return key;
    }
}

}  // namespace

std::vector<UniqueFrame> deduplicate(const std::vector<ReceptionRecord>& records,
                                     double window_s) {
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].time_ms < records[b].time_ms;
    });

    std::vector<UniqueFrame> frames;
    std::vector<std::int64_t> earliest_ms;
    std::unordered_map<std::string, std::size_t> latest_group;
    const std::int64_t window_ms = static_cast<std::int64_t>(window_s * 1000.0);

    for (std::size_t idx : order) {
        const ReceptionRecord& rec = records[idx];
        bool parseable = false;
        std::uint32_t dev_addr = 0;
        std::uint16_t fcnt = 0;
        const std::string key = dedup_key(rec, parseable, dev_addr, fcnt);
        auto it = latest_group.find(key);
        if (it != latest_group.end() &&
            rec.time_ms - earliest_ms[it->second] <= window_ms) {
            frames[it->second].receptions.push_back(rec);
            continue;
        }
        UniqueFrame frame;
        frame.parseable = parseable;
        frame.dev_addr = dev_addr;
        frame.fcnt = fcnt;
        frame.payload = rec.payload;
        frame.receptions.push_back(rec);
        frames.push_back(std::move(frame));
        earliest_ms.push_back(rec.time_ms);
        latest_group[key] = frames.size() - 1;
    }
    return frames;
}

Metric metric_from_name(const std::string& name) {
    if (name == "rssi") return Metric::Rssi;
    if (name == "snr") return Metric::Snr;
    if (name == "payload_size") return Metric::PayloadSize;
    if (name == "sf") return Metric::Sf;
    if (name == "freq") return Metric::Freq;
    if (name == "frames_per_device") return Metric::FramesPerDevice;
    throw std::invalid_argument("unknown metric: " + name);
}

std::string metric_name(Metric metric) {
    switch (metric) {
        case Metric::Rssi: return "rssi";
        case Metric::Snr: return "snr";
        case Metric::PayloadSize: return "payload_size";
        case Metric::Sf: return "sf";
        case Metric::Freq: return "freq";
        case Metric::FramesPerDevice: return "frames_per_device";
        case Metric::DistanceError: return "distance_error";
    }
    return "?";
}

namespace {

Histogram categorical_histogram(Metric metric, const std::vector<double>& values,
                                bool pdf) {
    std::map<double, std::uint64_t> counts;
    for (double v : values) ++counts[v];
    Histogram h;
    h.metric = metric;
    h.pdf = pdf;
    for (const auto& [v, c] : counts) {
        h.bins.push_back({v, v, c});
        h.total += c;
    }
    return h;
}

Histogram fixed_width_histogram(Metric metric, const std::vector<double>& values,
                                double width, bool pdf) {
    Histogram h;
    h.metric = metric;
    h.pdf = pdf;
    if (values.empty()) return h;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const long first = static_cast<long>(std::floor(*mn / width));
    const long last = static_cast<long>(std::floor(*mx / width));
    h.bins.resize(last - first + 1);
    for (long b = first; b <= last; ++b)
        h.bins[b - first] = {b * width, (b + 1) * width, 0};
    for (double v : values) {
        const long b = static_cast<long>(std::floor(v / width));
        ++h.bins[b - first].count;
        ++h.total;
    }
    return h;
}

Histogram log2_histogram(Metric metric, const std::vector<double>& values, bool pdf) {
    Histogram h;
    h.metric = metric;
    h.pdf = pdf;
    if (values.empty()) return h;
    double mx = *std::max_element(values.begin(), values.end());
    int top = 0;
    while (std::ldexp(1.0, top + 1) <= mx) ++top;
    for (int b = 0; b <= top; ++b)
        h.bins.push_back({std::ldexp(1.0, b), std::ldexp(1.0, b + 1), 0});
    for (double v : values) {
        if (v < 1.0) continue;
        const int b = static_cast<int>(std::floor(std::log2(v)));
        ++h.bins[b].count;
        ++h.total;
    }
    return h;
}

}  // namespace

Histogram histogram(const std::vector<ReceptionRecord>& records, Metric metric,
                    const Binning& binning) {
    if (binning.pdf && records.empty())
        throw std::invalid_argument("cannot normalize a pdf over empty input");

    std::vector<double> values;
    values.reserve(records.size());
    switch (metric) {
        case Metric::Rssi:
            for (const auto& r : records) values.push_back(r.rssi_dbm);
            return fixed_width_histogram(metric, values, binning.width, binning.pdf);
        case Metric::Snr:
            for (const auto& r : records) values.push_back(r.snr_db);
            return fixed_width_histogram(metric, values, binning.width, binning.pdf);
        case Metric::PayloadSize:
            for (const auto& r : records)
                values.push_back(static_cast<double>(r.payload.size()));
            return categorical_histogram(metric, values, binning.pdf);
        case Metric::Sf:
            for (const auto& r : records) values.push_back(r.sf);
            return categorical_histogram(metric, values, binning.pdf);
        case Metric::Freq:
            for (const auto& r : records)
                values.push_back(static_cast<double>(r.freq_hz));
            return categorical_histogram(metric, values, binning.pdf);
        case Metric::FramesPerDevice: {
            std::map<std::uint32_t, std::uint64_t> per_device;
            for (const auto& frame : deduplicate(records, binning.dedup_window_s))
                if (frame.parseable) ++per_device[frame.dev_addr];
            for (const auto& [addr, n] : per_device)
                values.push_back(static_cast<double>(n));
            return log2_histogram(metric, values, binning.pdf);
        }
        case Metric::DistanceError:
            break;  // produced by distance_error_report, not from raw records
    }
    throw std::invalid_argument("metric not derivable from reception records");
}

namespace {

bool printable_char(unsigned char c) {
    return std::isprint(c) != 0 || c == '\t' || c == '\n' || c == '\r';
}

std::string to_lower_trimmed(std::span<const std::uint8_t> bytes) {
    std::string s(bytes.begin(), bytes.end());
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    s = s.substr(b, e - b + 1);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

const std::regex& gps_pattern() {
    static const std::regex re(
        R"(^\s*[+-]?\d{1,3}\.\d+\s*,\s*[+-]?\d{1,3}\.\d+\s*$)");
    return re;
}

const std::regex& csv_decimals_pattern() {
    static const std::regex re(
        R"(^\s*[+-]?\d+(\.\d+)?(\s*,\s*[+-]?\d+(\.\d+)?)+\s*$)");
    return re;
}

}  // namespace

std::optional<GeoPoint> parse_gps_payload(std::span<const std::uint8_t> plaintext) {
    const std::string s(plaintext.begin(), plaintext.end());
    if (!std::regex_match(s, gps_pattern())) return std::nullopt;
    double lat = 0.0, lon = 0.0;
    if (std::sscanf(s.c_str(), " %lf , %lf", &lat, &lon) != 2) return std::nullopt;
    if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0)
        return std::nullopt;
    return GeoPoint{lat, lon};
}

PayloadClassification classify_payload(std::span<const std::uint8_t> plaintext,
                                       std::optional<std::uint8_t> fport) {
    // LoRaMote frames: binary sensor blob on FPort 2; best-effort heuristic
    if (fport && *fport == 2 && plaintext.size() == 16)
        return {PayloadClass::LoRaMote, ""};

    std::size_t printable = 0;
    for (std::size_t i = 0; i < plaintext.size(); ++i) {
        const std::uint8_t c = plaintext[i];
        if (printable_char(c)) {
            ++printable;
        } else if ((c == 0xC2 || c == 0xC3) && i + 1 < plaintext.size() &&
                   (plaintext[i + 1] & 0xC0) == 0x80) {
            // two-byte UTF-8 (Latin-1 supplement, e.g. the degree sign)
            printable += 2;
            ++i;
        }
    }
    const double ratio =
        plaintext.empty() ? 0.0
                          : static_cast<double>(printable) / plaintext.size();
    if (ratio < 0.9) return {PayloadClass::Binary, ""};

    if (parse_gps_payload(plaintext)) return {PayloadClass::GpsLocation, ""};

    const std::string lower = to_lower_trimmed(plaintext);
    if (lower.find("temp") != std::string::npos ||
        lower.find("\xc2\xb0""c") != std::string::npos)
        return {PayloadClass::Temperature, ""};
    if (lower.find("hum") != std::string::npos) return {PayloadClass::Humidity, ""};
    if (lower.find("bat") != std::string::npos)
        return {PayloadClass::BatteryLevel, ""};
    if (lower.find("lux") != std::string::npos ||
        lower.find("light") != std::string::npos)
        return {PayloadClass::Brightness, ""};
    if (lower.find("dist") != std::string::npos)
        return {PayloadClass::Distance, ""};
    for (const char* word : {"hello", "test", "foo", "coffee"}) {
        if (lower == word || lower.rfind(std::string(word), 0) == 0)
            return {PayloadClass::KnownString, word};
    }
    if (std::regex_match(lower, csv_decimals_pattern()))
        return {PayloadClass::CommaSeparatedDecimals, ""};
    return {PayloadClass::OtherReadable, ""};
}

std::string payload_class_name(const PayloadClassification& c) {
    switch (c.cls) {
        case PayloadClass::LoRaMote: return "loramote";
        case PayloadClass::CommaSeparatedDecimals: return "comma_separated_decimals";
        case PayloadClass::Temperature: return "temperature";
        case PayloadClass::Humidity: return "humidity";
        case PayloadClass::GpsLocation: return "gps_location";
        case PayloadClass::BatteryLevel: return "battery_level";
        case PayloadClass::Brightness: return "brightness";
        case PayloadClass::Distance: return "distance";
        case PayloadClass::KnownString: return "string:" + c.label;
        case PayloadClass::OtherReadable: return "other_readable";
        case PayloadClass::Binary: return "binary";
    }
    return "?";
}

DistanceErrorReport distance_error_report(const std::vector<UniqueFrame>& frames,
                                          double range_lo_m, double range_hi_m) {
    if (range_hi_m <= range_lo_m)
        throw std::invalid_argument("empty distance-error range");
    DistanceErrorReport report;
    Histogram& h = report.histogram;
    h.metric = Metric::DistanceError;
    // 1 m bins centered on whole meters, so near-zero errors of either sign
    // land in the single bin around zero
    const long n_bins = static_cast<long>(std::ceil(range_hi_m - range_lo_m)) + 1;
    for (long b = 0; b < n_bins; ++b)
        h.bins.push_back({range_lo_m + b - 0.5, range_lo_m + b + 0.5, 0});

    for (const UniqueFrame& frame : frames) {
        if (!frame.parseable) continue;
        std::optional<GeoPoint> node;
        try {
            const DecodedFrame decoded = decode_generic(frame.payload);
            node = parse_gps_payload(decoded.plaintext);
        } catch (const CodecError&) {
            continue;
        }
        if (!node) {
            ++report.skipped_no_gps_payload;
            continue;
        }
        for (const ReceptionRecord& rec : frame.receptions) {
            if (!rec.gateway_location) {
                ++report.skipped_no_gateway_location;
                continue;
            }
            const SignalObservation obs{rec.freq_hz / 1e6, rec.rssi_dbm};
            const double err = distance_error(*node, *rec.gateway_location, obs);
            if (err < range_lo_m - 0.5 || err >= range_hi_m + 0.5) {
                ++report.out_of_range;
                continue;
            }
            const long b = static_cast<long>(std::floor(err - (range_lo_m - 0.5)));
            ++h.bins[b].count;
            ++h.total;
            ++report.receptions_used;
        }
    }
    return report;
}

TraceSummary summary(const std::vector<ReceptionRecord>& records,
                     double dedup_window_s) {
    TraceSummary s;
    s.dedup_window_s = dedup_window_s;
    s.receptions = records.size();
    std::set<std::string> gateways;
    for (const auto& r : records) gateways.insert(r.gateway_id);
    s.gateways = gateways.size();

    const std::vector<UniqueFrame> frames = deduplicate(records, dedup_window_s);
    s.unique_frames = frames.size();
    std::set<std::uint32_t> devices;
    for (const UniqueFrame& f : frames) {
        if (f.parseable) devices.insert(f.dev_addr);
        std::set<std::string> frame_gws;
        for (const auto& rec : f.receptions) frame_gws.insert(rec.gateway_id);
        ++s.reception_count_distribution[frame_gws.size()];
    }
    s.unique_devices = devices.size();
    return s;
}

}  // namespace loratk
