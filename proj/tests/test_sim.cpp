#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "loratk/sim.hpp"

using namespace loratk;

namespace {

// Independent brute-force collision oracle: every pair, no sorting tricks.
std::vector<Fate> pairwise_oracle(const std::vector<TransmissionEvent>& events) {
    std::vector<Fate> fates(events.size(), Fate::Delivered);
    for (std::size_t i = 0; i < events.size(); ++i)
        for (std::size_t j = i + 1; j < events.size(); ++j) {
            const auto& a = events[i];
            const auto& b = events[j];
            if (a.channel_hz != b.channel_hz || a.sf != b.sf) continue;
            if (a.start_s < b.end_s() && b.start_s < a.end_s()) {
                fates[i] = Fate::Collided;
                fates[j] = Fate::Collided;
            }
        }
    return fates;
}

}  // namespace

TEST_CASE("traffic generation basics") {
    SimConfig cfg;
    cfg.packets_per_window = 0;
    SimRng rng(1);
    CHECK(generate_traffic(cfg, rng).empty());

    cfg.packets_per_window = 1000;
    cfg.confirmed_fraction = 0.25;
    SimRng r1(42), r2(42);
    const auto a = generate_traffic(cfg, r1);
    const auto b = generate_traffic(cfg, r2);
    REQUIRE(a.size() == 1000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].start_s == b[i].start_s);
        CHECK(a[i].sf == b[i].sf);
        CHECK(a[i].channel_hz == b[i].channel_hz);
        CHECK(a[i].wants_ack == b[i].wants_ack);
        CHECK(a[i].start_s >= 0.0);
        CHECK(a[i].start_s < cfg.window_s);
        CHECK(a[i].airtime_s > 0.0);
    }
}

TEST_CASE("SF selection is uniform within 5 sigma") {
    SimConfig cfg;
    cfg.packets_per_window = 6000;
    SimRng rng(7);
    const auto events = generate_traffic(cfg, rng);
    std::map<int, int> counts;
    for (const auto& e : events) ++counts[e.sf];
    // binomial(6000, 1/6): mean 1000, sigma ~28.9
    const double sigma = std::sqrt(6000.0 * (1.0 / 6.0) * (5.0 / 6.0));
    for (int sf = 7; sf <= 12; ++sf)
        CHECK(std::abs(counts[sf] - 1000.0) < 5.0 * sigma);
}

TEST_CASE("collision rule on constructed pairs") {
    const double at = 0.046336;  // SF7 @ PL 13+1 overhead territory
    auto make = [&](double start, int ch, int sf) {
        TransmissionEvent e;
        e.start_s = start;
        e.airtime_s = at;
        e.channel_hz = ch;
        e.sf = sf;
        return e;
    };

    SUBCASE("overlapping same channel and SF collide, both of them") {
        std::vector<TransmissionEvent> ev = {make(0.0, 868100000, 7),
                                             make(0.020, 868100000, 7)};
        detect_collisions(ev);
        CHECK(ev[0].fate == Fate::Collided);
        CHECK(ev[1].fate == Fate::Collided);
    }
    SUBCASE("gap larger than airtime delivers both") {
        std::vector<TransmissionEvent> ev = {make(0.0, 868100000, 7),
                                             make(0.050, 868100000, 7)};
        detect_collisions(ev);
        CHECK(ev[0].fate == Fate::Delivered);
        CHECK(ev[1].fate == Fate::Delivered);
    }
    SUBCASE("different channel or SF is orthogonal") {
        std::vector<TransmissionEvent> ev1 = {make(0.0, 868100000, 7),
                                              make(0.0, 868300000, 7)};
        detect_collisions(ev1);
        CHECK(ev1[0].fate == Fate::Delivered);
        CHECK(ev1[1].fate == Fate::Delivered);

        std::vector<TransmissionEvent> ev2 = {make(0.0, 868100000, 7),
                                              make(0.0, 868100000, 8)};
        detect_collisions(ev2);
        CHECK(ev2[0].fate == Fate::Delivered);
        CHECK(ev2[1].fate == Fate::Delivered);
    }
}

TEST_CASE("collision detection matches the pairwise oracle") {
    SimConfig cfg;
    for (int n : {2, 17, 100, 500}) {
        cfg.packets_per_window = n;
        SimRng rng(static_cast<std::uint64_t>(n) * 977 + 5);
        auto events = generate_traffic(cfg, rng);
        const auto expected = pairwise_oracle(events);
        detect_collisions(events);
        for (std::size_t i = 0; i < events.size(); ++i)
            CHECK(events[i].fate == expected[i]);
    }
}

TEST_CASE("single packet never collides") {
    SimConfig cfg;
    cfg.packets_per_window = 1;
    cfg.trials = 50;
    const auto report = simulate_uplink_collisions(cfg);
    CHECK(report.collided == 0);
    for (const auto& [sf, stats] : report.per_sf)
        CHECK(stats.collision_rate() == 0.0);
}

TEST_CASE("collision rate grows with load") {
    SimConfig cfg;
    cfg.trials = 150;
    cfg.seed = 11;
    cfg.packets_per_window = 100;
    const auto low = simulate_uplink_collisions(cfg);
    cfg.packets_per_window = 1000;
    const auto high = simulate_uplink_collisions(cfg);
    for (int sf = 7; sf <= 12; ++sf)
        CHECK(high.per_sf.at(sf).collision_rate() >=
              low.per_sf.at(sf).collision_rate());
}

TEST_CASE("simulate_uplink_collisions requires unconfirmed traffic") {
    SimConfig cfg;
    cfg.packets_per_window = 10;
    cfg.confirmed_fraction = 0.5;
    CHECK_THROWS_AS(simulate_uplink_collisions(cfg), std::invalid_argument);
}

TEST_CASE("reports are deterministic given the seed") {
    SimConfig cfg;
    cfg.packets_per_window = 300;
    cfg.confirmed_fraction = 0.02;
    cfg.trials = 20;
    cfg.seed = 99;
    const auto a = simulate_with_confirmations(cfg);
    const auto b = simulate_with_confirmations(cfg);
    CHECK(a.collided == b.collided);
    CHECK(a.delivered == b.delivered);
    CHECK(a.lost_gateway_busy == b.lost_gateway_busy);
    CHECK(a.acks_sent == b.acks_sent);
    CHECK(a.acks_dropped == b.acks_dropped);
    CHECK(a.gateway_tx_time_s == b.gateway_tx_time_s);
}

TEST_CASE("p = 0 reduces the confirmed pipeline to the plain one") {
    SimConfig cfg;
    cfg.packets_per_window = 400;
    cfg.trials = 10;
    cfg.seed = 3;
    const auto plain = simulate_uplink_collisions(cfg);
    const auto confirmed = simulate_with_confirmations(cfg);
    CHECK(plain.collided == confirmed.collided);
    CHECK(plain.delivered == confirmed.delivered);
    CHECK(confirmed.acks_sent == 0);
    CHECK(confirmed.gateway_tx_time_s == 0.0);
    CHECK_FALSE(confirmed.duty_violation);
}

TEST_CASE("fates partition the uplinks") {
    SimConfig cfg;
    cfg.packets_per_window = 500;
    cfg.confirmed_fraction = 0.05;
    cfg.trials = 30;
    const auto r = simulate_with_confirmations(cfg);
    CHECK(r.delivered + r.collided + r.lost_gateway_busy == r.uplinks);
    CHECK(r.uplinks == 500ULL * 30ULL);
    CHECK(r.overall_loss_rate() >= 0.0);
    CHECK(r.overall_loss_rate() <= 1.0);
}

TEST_CASE("loss grows with the confirmed share") {
    SimConfig cfg;
    cfg.packets_per_window = 500;
    cfg.trials = 120;
    cfg.seed = 17;
    double prev = -1.0;
    for (double p : {0.0, 0.02, 0.10}) {
        cfg.confirmed_fraction = p;
        const auto r = simulate_with_confirmations(cfg);
        CHECK(r.overall_loss_rate() >= prev);
        prev = r.overall_loss_rate();
    }
}

TEST_CASE("higher SF suffers more collisions") {
    SimConfig cfg;
    cfg.packets_per_window = 500;
    cfg.trials = 120;
    const auto r = simulate_uplink_collisions(cfg);
    CHECK(r.per_sf.at(12).collision_rate() >= r.per_sf.at(7).collision_rate());
}

TEST_CASE("acks consume gateway airtime and can violate the duty cycle") {
    SimConfig cfg;
    cfg.packets_per_window = 600;
    cfg.confirmed_fraction = 0.10;  // heavy confirmed load
    cfg.trials = 50;
    const auto r = simulate_with_confirmations(cfg);
    CHECK(r.acks_sent > 0);
    CHECK(r.gateway_tx_time_s > 0.0);
    CHECK(r.gateway_airtime_fraction ==
          doctest::Approx(r.gateway_tx_time_s / cfg.window_s));
    CHECK(r.duty_violation);
    CHECK(r.lost_gateway_busy > 0);
}

TEST_CASE("sweep covers the grid deterministically") {
    SimConfig base;
    base.trials = 5;
    base.seed = 123;

    const std::vector<int> ns = {100, 200, 300};
    const std::vector<double> ps = {0.0, 0.01};
    const auto table = sweep(base, ns, ps);
    REQUIRE(table.size() == 6);

    const auto again = sweep(base, ns, ps);
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(table[i].packets_per_window == again[i].packets_per_window);
        CHECK(table[i].report.collided == again[i].report.collided);
        CHECK(table[i].report.gateway_tx_time_s == again[i].report.gateway_tx_time_s);
    }

    SUBCASE("single-point grid equals a direct call") {
        SimConfig direct = base;
        direct.packets_per_window = 100;
        direct.confirmed_fraction = 0.01;
        const auto one = sweep(base, {100}, {0.01});
        const auto ref = simulate_with_confirmations(direct);
        CHECK(one[0].report.collided == ref.collided);
        CHECK(one[0].report.acks_sent == ref.acks_sent);
        CHECK(one[0].report.gateway_tx_time_s == ref.gateway_tx_time_s);
    }

    SUBCASE("empty grid is rejected") {
        CHECK_THROWS_AS(sweep(base, {}, ps), std::invalid_argument);
    }
}

TEST_CASE("mean loss over an n sweep is monotone") {
    SimConfig base;
    base.trials = 100;
    base.seed = 29;
    std::vector<int> ns;
    for (int n = 100; n <= 1000; n += 100) ns.push_back(n);
    const auto table = sweep(base, ns, {0.0});
    double prev = -1.0;
    for (const auto& point : table) {
        CHECK(point.report.overall_loss_rate() >= prev);
        prev = point.report.overall_loss_rate();
    }
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.packets_per_window = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SimConfig{};
    cfg.confirmed_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SimConfig{};
    cfg.window_s = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SimConfig{};
    cfg.sfs = {6};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
