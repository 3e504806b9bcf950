#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "loratk/radio.hpp"

using namespace loratk;

TEST_CASE("symbol time matches direct evaluation") {
    CHECK(symbol_time(RadioConfig::lorawan(7)) == doctest::Approx(0.001024).epsilon(1e-12));
    CHECK(symbol_time(RadioConfig::lorawan(12)) == doctest::Approx(0.032768).epsilon(1e-12));
    CHECK(symbol_time(RadioConfig::lorawan(7, 250000)) == doctest::Approx(0.000512).epsilon(1e-12));
}

TEST_CASE("preamble time") {
    CHECK(preamble_time(RadioConfig::lorawan(7)) == doctest::Approx(0.012544).epsilon(1e-12));
    CHECK(preamble_time(RadioConfig::lorawan(12)) == doctest::Approx(0.401408).epsilon(1e-12));
    CHECK(preamble_time(RadioConfig::lorawan(7, 125000, 1, 0)) ==
          doctest::Approx(0.004352).epsilon(1e-12));
}

TEST_CASE("payload symbol counts") {
    CHECK(payload_symbols(RadioConfig::lorawan(7), 13) == 33);
    CHECK(payload_symbols(RadioConfig::lorawan(12), 13) == 23);  // DE = 1
    CHECK(payload_symbols(RadioConfig::lorawan(7), 0) == 13);
}

TEST_CASE("frame airtime hand-checked values") {
    CHECK(frame_airtime(RadioConfig::lorawan(7), 13) ==
          doctest::Approx(0.046336).epsilon(1e-9));
    CHECK(frame_airtime(RadioConfig::lorawan(12), 13) ==
          doctest::Approx(1.155072).epsilon(1e-9));
}

TEST_CASE("airtime is piecewise constant in payload within one beta step") {
    // SF7, PL 13 and 14 share beta = 5
    CHECK(frame_airtime(RadioConfig::lorawan(7), 13) ==
          frame_airtime(RadioConfig::lorawan(7), 14));
}

TEST_CASE("airtime monotone in payload and SF") {
    for (int sf = 7; sf <= 12; ++sf) {
        const auto cfg = RadioConfig::lorawan(sf);
        double prev = 0.0;
        for (int pl = 0; pl <= 230; ++pl) {
            const double t = frame_airtime(cfg, pl);
            CHECK(t >= prev);
            prev = t;
        }
    }
    for (int pl : {0, 13, 51, 230}) {
        double prev = 0.0;
        for (int sf = 7; sf <= 12; ++sf) {
            const double t = frame_airtime(RadioConfig::lorawan(sf), pl);
            CHECK(t >= prev);
            prev = t;
        }
    }
}

TEST_CASE("payload symbols never drop below the 8-symbol floor") {
    for (int sf = 7; sf <= 12; ++sf)
        for (int pl = 0; pl <= 230; ++pl)
            CHECK(payload_symbols(RadioConfig::lorawan(sf), pl) >= 8);
}

TEST_CASE("airtime doubles when bandwidth halves") {
    // SF9 avoids the DE flag flip between 125 and 250 kHz
    const double t125 = frame_airtime(RadioConfig::lorawan(9, 125000), 20);
    const double t250 = frame_airtime(RadioConfig::lorawan(9, 250000), 20);
    CHECK(t125 == doctest::Approx(2.0 * t250).epsilon(1e-12));
}

TEST_CASE("low data-rate optimization enforced at construction") {
    CHECK(RadioConfig::lorawan(11).low_dr_opt);
    CHECK(RadioConfig::lorawan(12).low_dr_opt);
    CHECK_FALSE(RadioConfig::lorawan(10).low_dr_opt);
    CHECK_FALSE(RadioConfig::lorawan(12, 250000).low_dr_opt);

    RadioConfig bad = RadioConfig::lorawan(12);
    bad.low_dr_opt = false;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = RadioConfig::lorawan(7);
    bad.low_dr_opt = true;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config validation rejects out-of-range values") {
    CHECK_THROWS_AS(RadioConfig::lorawan(6), std::invalid_argument);
    CHECK_THROWS_AS(RadioConfig::lorawan(13), std::invalid_argument);
    CHECK_THROWS_AS(RadioConfig::lorawan(7, 125000, 5), std::invalid_argument);
    CHECK_THROWS_AS(RadioConfig::lorawan(7, -1), std::invalid_argument);
}

TEST_CASE("frames per day") {
    const auto plan = RegionPlan::eu868();
    CHECK(frames_per_day(RadioConfig::lorawan(7), 13, plan) == 18646);
    CHECK(frames_per_day(RadioConfig::lorawan(12), 13, plan) == 748);

    RegionPlan zero = plan;
    zero.duty_cycle = 0.0;
    CHECK(frames_per_day(RadioConfig::lorawan(7), 13, zero) == 0);
}

TEST_CASE("frames per day rejects oversized payloads, naming the limit") {
    const auto plan = RegionPlan::eu868();
    CHECK_THROWS_WITH_AS(frames_per_day(RadioConfig::lorawan(10), 60, plan),
                         doctest::Contains("59"), std::invalid_argument);
    CHECK_NOTHROW(frames_per_day(RadioConfig::lorawan(10), 59, plan));
}

TEST_CASE("duty budget never exceeded by more than one frame") {
    const auto plan = RegionPlan::eu868();
    for (int sf = 7; sf <= 12; ++sf) {
        const auto cfg = RadioConfig::lorawan(sf);
        const int cap = plan.max_payload_by_sf.at(sf);
        for (int pl = 0; pl <= cap; pl += 7) {
            const double t = frame_airtime(cfg, pl);
            const double used = frames_per_day(cfg, pl, plan) * t;
            CHECK(used <= 86400.0 * plan.duty_cycle + t);
        }
    }
}

TEST_CASE("data per day") {
    const auto plan = RegionPlan::eu868();
    CHECK(data_per_day(RadioConfig::lorawan(7), 13, plan) == 242398);
    CHECK(data_per_day(RadioConfig::lorawan(12), 13, plan) == 9724);
    CHECK(data_per_day(RadioConfig::lorawan(7), 0, plan) == 0);
}

TEST_CASE("EU868 indicative bitrates") {
    CHECK(indicative_bitrate(RadioConfig::lorawan(12)) == 250);
    CHECK(indicative_bitrate(RadioConfig::lorawan(11)) == 440);
    CHECK(indicative_bitrate(RadioConfig::lorawan(10)) == 980);
    CHECK(indicative_bitrate(RadioConfig::lorawan(9)) == 1760);
    CHECK(indicative_bitrate(RadioConfig::lorawan(8)) == 3125);
    CHECK(indicative_bitrate(RadioConfig::lorawan(7)) == 5470);
    CHECK(indicative_bitrate(RadioConfig::lorawan(7, 250000)) == 11000);
}

TEST_CASE("unknown configurations are rejected by bitrate lookup") {
    RadioConfig odd = RadioConfig::lorawan(9);
    odd.bw_hz = 500000;
    CHECK_THROWS_WITH_AS(indicative_bitrate(odd), doctest::Contains("SF9"),
                         std::invalid_argument);
}

TEST_CASE("data-rate table carries FSK and reserved rows") {
    const auto& rows = eu868_data_rates();
    REQUIRE(rows.size() == 16);
    CHECK(rows[7].modulation == Modulation::Fsk);
    CHECK(rows[7].bitrate_bps == 50000);
    for (int dr = 8; dr <= 15; ++dr) CHECK(rows[dr].modulation == Modulation::Rfu);
}

TEST_CASE("EU868 plan defaults") {
    const auto plan = RegionPlan::eu868();
    CHECK(plan.channels_hz == std::vector<int>{868100000, 868300000, 868500000});
    CHECK(plan.duty_cycle == 0.01);
    CHECK(plan.max_tx_dbm == 14);
    CHECK(plan.max_payload_by_sf.at(7) == 230);
    CHECK(plan.max_payload_by_sf.at(9) == 123);
    CHECK(plan.max_payload_by_sf.at(12) == 59);
}
