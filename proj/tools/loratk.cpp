// loratk: LoRaWAN airtime, capacity, collision simulation, distance
// estimation, frame decoding, and gateway-trace analytics on the command line.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loratk/codec.hpp"
#include "loratk/pathloss.hpp"
#include "loratk/radio.hpp"
#include "loratk/sim.hpp"
#include "loratk/trace.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
    std::string out;
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::vector<std::string> argv;
};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// "7", "7..12", "100..1000:100", or "1,2,3"
std::vector<int> parse_int_range(const std::string& text) {
    std::vector<int> out;
    if (text.find(',') != std::string::npos) {
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
        return out;
    }
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        out.push_back(std::stoi(text));
        return out;
    }
    const int lo = std::stoi(text.substr(0, dots));
    std::string rest = text.substr(dots + 2);
    int step = 1;
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
        step = std::stoi(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    const int hi = std::stoi(rest);
    if (step <= 0 || hi < lo) throw CLI::ValidationError("bad range: " + text);
    for (int v = lo; v <= hi; v += step) out.push_back(v);
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw CLI::ValidationError("empty list: " + text);
    return out;
}

void write_manifest(const GlobalOpts& g, const std::string& subcommand,
                    const std::vector<std::string>& outputs) {
    if (g.out.empty()) return;
    nlohmann::json m;
    m["subcommand"] = subcommand;
    m["argv"] = g.argv;
    m["seed"] = g.seed;
    m["version"] = kVersion;
    m["outputs"] = outputs;
    std::ofstream f(g.out + ".manifest.json");
    f << m.dump(2) << "\n";
}

/// Writes to --out when given, stdout otherwise; emits the run manifest next
/// to every file output.
void emit(const GlobalOpts& g, const std::string& subcommand,
          const std::string& content) {
    if (g.out.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + g.out);
    f << content;
    write_manifest(g, subcommand, {g.out});
}

std::vector<std::uint8_t> parse_hex(const std::string& text) {
    if (text.size() % 2 != 0)
        throw std::invalid_argument("hex string must have even length");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 2);
    for (std::size_t i = 0; i < text.size(); i += 2) {
        const std::string byte = text.substr(i, 2);
        out.push_back(static_cast<std::uint8_t>(std::stoul(byte, nullptr, 16)));
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> data) {
    static const char* digits = "0123456789ABCDEF";
    std::string s;
    for (std::uint8_t b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0x0F]);
    }
    return s;
}

// ---------------------------------------------------------------- airtime

int run_airtime(const GlobalOpts& g, const std::string& sf_spec, int bw, int cr,
                int preamble, int payload, const std::string& sweep_payload) {
    const std::vector<int> sfs = parse_int_range(sf_spec);
    std::vector<int> payloads;
    if (!sweep_payload.empty())
        payloads = parse_int_range(sweep_payload);
    else
        payloads = {payload};

    if (sfs.size() == 1 && payloads.size() == 1) {
        const auto cfg = loratk::RadioConfig::lorawan(sfs[0], bw, cr, preamble);
        const double ms = loratk::frame_airtime(cfg, payloads[0]) * 1000.0;
        emit(g, "airtime", fmt("%.3f", ms) + " ms\n");
        return 0;
    }
    std::string csv = "sf,payload_bytes,airtime_ms\n";
    for (int sf : sfs) {
        const auto cfg = loratk::RadioConfig::lorawan(sf, bw, cr, preamble);
        for (int pl : payloads)
            csv += std::to_string(sf) + "," + std::to_string(pl) + "," +
                   fmt("%.3f", loratk::frame_airtime(cfg, pl) * 1000.0) + "\n";
    }
    emit(g, "airtime", csv);
    return 0;
}

// ----------------------------------------------------------------- limits

int run_limits(const GlobalOpts& g, const std::string& sf_spec,
               const std::string& payload_spec, double duty) {
    loratk::RegionPlan plan = loratk::RegionPlan::eu868();
    plan.duty_cycle = duty;
    std::string csv = "sf,payload_bytes,airtime_ms,frames_per_day,bytes_per_day\n";
    for (int sf : parse_int_range(sf_spec)) {
        const auto cfg = loratk::RadioConfig::lorawan(sf);
        const int cap = plan.max_payload_by_sf.at(sf);
        for (int pl : parse_int_range(payload_spec)) {
            if (pl > cap) {
                std::cerr << "warning: payload " << pl << " exceeds SF" << sf
                          << " limit of " << cap << " bytes, row omitted\n";
                continue;
            }
            csv += std::to_string(sf) + "," + std::to_string(pl) + "," +
                   fmt("%.3f", loratk::frame_airtime(cfg, pl) * 1000.0) + "," +
                   std::to_string(loratk::frames_per_day(cfg, pl, plan)) + "," +
                   std::to_string(loratk::data_per_day(cfg, pl, plan)) + "\n";
        }
    }
    emit(g, "limits", csv);
    return 0;
}

// --------------------------------------------------------------- simulate

std::string report_csv_header() {
    std::string h = "n,confirmed_pct,trials,uplinks,delivered,collided,"
                    "lost_gateway_busy,acks_sent,acks_dropped";
    for (int sf = 7; sf <= 12; ++sf)
        h += ",collision_rate_sf" + std::to_string(sf);
    h += ",overall_loss_rate,gateway_airtime_fraction,duty_violation\n";
    return h;
}

std::string report_csv_row(int n, double p, const loratk::SimReport& r) {
    std::string row = std::to_string(n) + "," + fmt("%.6g", p * 100.0) + "," +
                      std::to_string(r.windows) + "," + std::to_string(r.uplinks) +
                      "," + std::to_string(r.delivered) + "," +
                      std::to_string(r.collided) + "," +
                      std::to_string(r.lost_gateway_busy) + "," +
                      std::to_string(r.acks_sent) + "," +
                      std::to_string(r.acks_dropped);
    for (int sf = 7; sf <= 12; ++sf) {
        const auto it = r.per_sf.find(sf);
        row += "," + fmt("%.9g", it == r.per_sf.end() ? 0.0 : it->second.collision_rate());
    }
    row += "," + fmt("%.9g", r.overall_loss_rate());
    row += "," + fmt("%.9g", r.gateway_airtime_fraction);
    row += std::string(",") + (r.duty_violation ? "1" : "0") + "\n";
    return row;
}

int run_simulate(const GlobalOpts& g, const std::string& n_spec,
                 const std::string& confirmed_spec, double window_s, int payload,
                 int overhead, double rx1_delay, int trials) {
    loratk::SimConfig base;
    base.window_s = window_s;
    base.payload_bytes = payload;
    base.overhead_bytes = overhead;
    base.rx1_delay_s = rx1_delay;
    base.trials = trials;
    base.seed = g.seed;

    const std::vector<int> ns = parse_int_range(n_spec);
    std::vector<double> ps;
    for (double pct : parse_double_list(confirmed_spec)) ps.push_back(pct / 100.0);

    std::string csv = report_csv_header();
    for (const auto& point : loratk::sweep(base, ns, ps))
        csv += report_csv_row(point.packets_per_window, point.confirmed_fraction,
                              point.report);
    emit(g, "simulate", csv);
    return 0;
}

// --------------------------------------------------------------- distance

int run_distance(const GlobalOpts& g, double freq_mhz, double rssi,
                 const std::string& batch) {
    if (batch.empty()) {
        const double d = loratk::estimate_distance({freq_mhz, rssi});
        emit(g, "distance", fmt("%.3f", d) + " m\n");
        return 0;
    }
    std::ifstream in(batch);
    if (!in) throw std::runtime_error("cannot open batch file: " + batch);
    std::string csv = "freq_mhz,rssi_db,distance_m\n";
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("freq", 0) == 0) continue;
        double f = 0.0, s = 0.0;
        if (std::sscanf(line.c_str(), "%lf , %lf", &f, &s) != 2)
            throw std::runtime_error("bad batch line: " + line);
        csv += fmt("%.6g", f) + "," + fmt("%.6g", s) + "," +
               fmt("%.3f", loratk::estimate_distance({f, s})) + "\n";
    }
    emit(g, "distance", csv);
    return 0;
}

// ---------------------------------------------------------------- analyze

std::string histogram_csv(const loratk::Histogram& h, double dedup_window,
                          bool pdf) {
    std::string csv = "# metric=" + loratk::metric_name(h.metric) +
                      " dedup_window_s=" + fmt("%.6g", dedup_window) +
                      " rules=" + loratk::kClassifierVersion +
                      " pdf=" + (pdf ? std::string("1") : std::string("0")) + "\n";
    csv += "bin_lower,bin_upper,count,share\n";
    for (std::size_t i = 0; i < h.bins.size(); ++i) {
        csv += fmt("%.6g", h.bins[i].lower) + "," + fmt("%.6g", h.bins[i].upper) +
               "," + std::to_string(h.bins[i].count) + "," +
               fmt("%.9g", h.density(i)) + "\n";
    }
    return csv;
}

int run_analyze(const GlobalOpts& g, const std::string& input,
                std::vector<std::string> metrics, double dedup_window, bool pdf) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open trace file: " + input);
    const loratk::IngestResult ingested = loratk::ingest(in);
    const auto& records = ingested.records;

    if (metrics.empty())
        metrics = {"rssi", "snr", "payload_size", "sf",
                   "freq", "frames_per_device", "distance_error"};

    const loratk::TraceSummary s = loratk::summary(records, dedup_window);
    std::string summary_csv = "key,value\n";
    summary_csv += "receptions," + std::to_string(s.receptions) + "\n";
    summary_csv += "skipped_lines," + std::to_string(ingested.skipped) + "\n";
    summary_csv += "unique_frames," + std::to_string(s.unique_frames) + "\n";
    summary_csv += "unique_devices," + std::to_string(s.unique_devices) + "\n";
    summary_csv += "gateways," + std::to_string(s.gateways) + "\n";
    for (const auto& [k, v] : s.reception_count_distribution)
        summary_csv += "frames_seen_by_" + std::to_string(k) + "_gateways," +
                       std::to_string(v) + "\n";

    std::vector<std::string> outputs;
    // the summary goes to --out itself; each metric to "<out stem>_<metric>.csv"
    auto write_file = [&](const std::string& path, const std::string& content) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << content;
        outputs.push_back(path);
    };
    std::string stem = g.out;
    if (const auto dot = stem.rfind('.');
        dot != std::string::npos && stem.find('/', dot) == std::string::npos)
        stem = stem.substr(0, dot);
    auto emit_one = [&](const std::string& name, const std::string& content) {
        if (g.out.empty())
            std::cout << "== " << name << " ==\n" << content;
        else if (name == "summary")
            write_file(g.out, content);
        else
            write_file(stem + "_" + name + ".csv", content);
    };

    emit_one("summary", summary_csv);
    loratk::Binning binning;
    binning.pdf = pdf;
    binning.dedup_window_s = dedup_window;
    for (const std::string& name : metrics) {
        if (name == "distance_error") {
            const auto frames = loratk::deduplicate(records, dedup_window);
            const auto rep = loratk::distance_error_report(frames);
            emit_one(name, histogram_csv(rep.histogram, dedup_window, false));
            continue;
        }
        const auto h =
            loratk::histogram(records, loratk::metric_from_name(name), binning);
        emit_one(name, histogram_csv(h, dedup_window, pdf));
    }
    if (!g.out.empty()) write_manifest(g, "analyze", outputs);
    return 0;
}

// ----------------------------------------------------------------- decode

int run_decode(const GlobalOpts& g, const std::string& hex, const std::string& b64,
               const std::string& key_hex) {
    std::vector<std::uint8_t> raw;
    if (!hex.empty())
        raw = parse_hex(hex);
    else if (!b64.empty())
        raw = loratk::base64_decode(b64);
    else
        throw CLI::ValidationError("decode needs --hex or --b64");

    loratk::Key128 key = loratk::generic_key();
    if (!key_hex.empty()) {
        const auto bytes = parse_hex(key_hex);
        if (bytes.size() != 16)
            throw std::invalid_argument("key must be 16 bytes of hex");
        std::copy(bytes.begin(), bytes.end(), key.begin());
    }

    const loratk::DecodedFrame d = loratk::decode(raw, key);
    std::string out;
    out += "mhdr: 0x" + to_hex(std::span(&d.mhdr, 1)) + "\n";
    if (!d.frame) {
        out += "type: non-data frame (opaque)\n";
        emit(g, "decode", out);
        return 0;
    }
    const loratk::PhyFrame& f = *d.frame;
    char addr[16];
    std::snprintf(addr, sizeof(addr), "%08X", f.dev_addr);
    out += "dev_addr: " + std::string(addr) + "\n";
    out += "fctrl: 0x" + to_hex(std::span(&f.fctrl, 1)) + "\n";
    out += "fcnt: " + std::to_string(f.fcnt) + "\n";
    out += "fopts: " + (f.fopts.empty() ? std::string("-") : to_hex(f.fopts)) + "\n";
    out += "fport: " + (f.fport ? std::to_string(*f.fport) : std::string("-")) + "\n";
    out += "frm_payload: " + to_hex(f.frm_payload) + "\n";
    out += "plaintext_hex: " + to_hex(d.plaintext) + "\n";
    std::string text(d.plaintext.begin(), d.plaintext.end());
    const bool printable = !text.empty() &&
                           std::all_of(text.begin(), text.end(), [](unsigned char c) {
                               return std::isprint(c) || std::isspace(c);
                           });
    out += "plaintext: " + (printable ? text : std::string("-")) + "\n";
    out += "mic: " + to_hex(f.mic) + "\n";
    out += std::string("mic_ok: ") + (d.mic_ok ? "true" : "false") + "\n";
    emit(g, "decode", out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LoRaWAN modeling toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
    app.add_option("--out", g.out, "Write output to this file (plus a .manifest.json)");
    app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    app.add_option("--format", g.format, "Output format (csv)")
        ->check(CLI::IsMember({"csv"}));
    // let global flags appear after the subcommand name too
    auto add_subcommand = [&app](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        return sub;
    };

    // airtime
    auto* airtime = add_subcommand("airtime", "LoRa time on air");
    std::string at_sf = "7", at_sweep;
    int at_bw = 125000, at_cr = 1, at_preamble = 8, at_payload = 13;
    airtime->add_option("--sf", at_sf, "Spreading factor (7 or 7..12)");
    airtime->add_option("--bw", at_bw, "Bandwidth in Hz");
    airtime->add_option("--cr", at_cr, "Coding-rate index (1 = 4/5)");
    airtime->add_option("--preamble", at_preamble, "Preamble symbols");
    airtime->add_option("--payload", at_payload, "PHY payload bytes");
    airtime->add_option("--sweep-payload", at_sweep, "Payload range, e.g. 0..230");

    // limits
    auto* limits = add_subcommand("limits", "EU868 daily capacity limits");
    std::string lim_sf = "7..12", lim_payload = "1..230";
    double lim_duty = 0.01;
    limits->add_option("--sf", lim_sf, "Spreading factors");
    limits->add_option("--payload", lim_payload, "Payload bytes or range");
    limits->add_option("--duty", lim_duty, "Duty cycle fraction");

    // simulate
    auto* simulate = add_subcommand("simulate", "Single-gateway collision simulation");
    std::string sim_n = "100", sim_confirmed = "0";
    double sim_window = 60.0, sim_rx1 = 1.0;
    int sim_payload = 1, sim_overhead = 13, sim_trials = 100;
    simulate->add_option("--n", sim_n, "Packets per window (int, range, or list)");
    simulate->add_option("--confirmed", sim_confirmed,
                         "Confirmed traffic in percent (value or list)");
    simulate->add_option("--window", sim_window, "Window length in seconds");
    simulate->add_option("--payload", sim_payload, "Application payload bytes");
    simulate->add_option("--overhead", sim_overhead, "LoRaWAN overhead bytes");
    simulate->add_option("--rx1-delay", sim_rx1, "RX1 delay in seconds");
    simulate->add_option("--trials", sim_trials, "Monte-Carlo windows per point");

    // distance
    auto* distance = add_subcommand("distance", "Free-space distance estimate");
    double dist_freq = 868.1, dist_rssi = -100.0;
    std::string dist_batch;
    distance->add_option("--freq", dist_freq, "Carrier frequency in MHz");
    distance->add_option("--rssi,--level", dist_rssi, "Received signal level in dB");
    distance->add_option("--batch", dist_batch, "CSV file of freq_mhz,rssi_db rows");

    // analyze
    auto* analyze = add_subcommand("analyze", "Gateway trace analytics");
    std::string an_input;
    std::vector<std::string> an_metrics;
    double an_window = 5.0;
    bool an_pdf = false;
    analyze->add_option("--input", an_input, "Line-delimited trace file")->required();
    analyze->add_option("--metric", an_metrics, "Metrics to compute (repeatable)");
    analyze->add_option("--dedup-window", an_window, "Dedup window in seconds");
    analyze->add_flag("--pdf", an_pdf, "Normalize histograms to densities");

    // decode
    auto* decode = add_subcommand("decode", "Decode a LoRaWAN PHY payload");
    std::string dec_hex, dec_b64, dec_key;
    decode->add_option("--hex", dec_hex, "Frame as hex");
    decode->add_option("--b64", dec_b64, "Frame as base64");
    decode->add_option("--key", dec_key, "Session key as hex (default: generic)");

    try {
        app.parse(argc, argv);
        if (airtime->parsed())
            return run_airtime(g, at_sf, at_bw, at_cr, at_preamble, at_payload, at_sweep);
        if (limits->parsed()) return run_limits(g, lim_sf, lim_payload, lim_duty);
        if (simulate->parsed())
            return run_simulate(g, sim_n, sim_confirmed, sim_window, sim_payload,
                                sim_overhead, sim_rx1, sim_trials);
        if (distance->parsed()) return run_distance(g, dist_freq, dist_rssi, dist_batch);
        if (analyze->parsed())
            return run_analyze(g, an_input, an_metrics, an_window, an_pdf);
        if (decode->parsed()) return run_decode(g, dec_hex, dec_b64, dec_key);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const loratk::CodecError& e) {
        std::cerr << "decode error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
