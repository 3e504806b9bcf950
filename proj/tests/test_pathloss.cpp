#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "loratk/pathloss.hpp"

using namespace loratk;

TEST_CASE("distance estimate hand-checked values") {
    CHECK(estimate_distance({868.1, -100.0}) == doctest::Approx(2747.45).epsilon(5e-4));
    CHECK(estimate_distance({433.0, -80.0}) == doctest::Approx(550.82).epsilon(5e-4));
}

TEST_CASE("unit-distance inversion returns exactly 1 m") {
    const double unit_level = 20.0 * std::log10(868.1) - 27.55;
    CHECK(estimate_distance({868.1, -unit_level}) == 1.0);
}

TEST_CASE("estimate rejects non-positive frequency") {
    CHECK_THROWS_AS(estimate_distance({0.0, -100.0}), std::domain_error);
    CHECK_THROWS_AS(estimate_distance({-868.1, -100.0}), std::domain_error);
}

TEST_CASE("estimate monotone in level magnitude and frequency") {
    double prev = 0.0;
    for (double s = -40.0; s >= -130.0; s -= 1.0) {
        const double d = estimate_distance({868.1, s});
        CHECK(d > prev);
        prev = d;
    }
    prev = estimate_distance({100.0, -100.0});
    for (double f = 200.0; f <= 1000.0; f += 100.0) {
        const double d = estimate_distance({f, -100.0});
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("level inversion round-trips within 1e-9 relative error") {
    for (double d : {1.0, 10.0, 550.0, 2747.0, 90000.0}) {
        const double level = level_for_distance(868.1, d);
        CHECK(estimate_distance({868.1, -level}) == doctest::Approx(d).epsilon(1e-9));
    }
}

TEST_CASE("great-circle distance") {
    const GeoPoint delft{52.00, 4.36};
    CHECK(great_circle_distance(delft, delft) == 0.0);
    CHECK(great_circle_distance(delft, {52.01, 4.36}) ==
          doctest::Approx(1111.95).epsilon(1e-3));
}

TEST_CASE("great-circle distance is a metric on sampled points") {
    const GeoPoint pts[] = {{52.0, 4.36}, {51.5, -0.1}, {-33.9, 151.2}, {0.0, 0.0},
                            {89.0, 10.0}, {52.0, 4.37}};
    for (const auto& a : pts)
        for (const auto& b : pts) {
            const double dab = great_circle_distance(a, b);
            CHECK(dab >= 0.0);
            CHECK(dab == doctest::Approx(great_circle_distance(b, a)).epsilon(1e-12));
            if (a.lat_deg == b.lat_deg && a.lon_deg == b.lon_deg)
                CHECK(dab == 0.0);
            else
                CHECK(dab > 0.0);
        }
}

TEST_CASE("geo point validation") {
    CHECK_THROWS_AS((GeoPoint{91.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GeoPoint{0.0, 181.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((GeoPoint{-90.0, 180.0}.validate()));
}

TEST_CASE("signed distance error") {
    const GeoPoint node{52.00, 4.36};
    const GeoPoint gw{52.01, 4.36};
    const double measured = great_circle_distance(node, gw);

    // plant a level that makes the estimate match the measurement
    const double level = level_for_distance(868.1, measured);
    CHECK(distance_error(node, gw, {868.1, -level}) ==
          doctest::Approx(0.0).epsilon(1e-9));

    // estimate 2747 m vs about 1112 m measured: positive overestimation
    const double err = distance_error(node, gw, {868.1, -100.0});
    CHECK(err == doctest::Approx(estimate_distance({868.1, -100.0}) - measured)
                     .epsilon(1e-12));
    CHECK(err > 0.0);

    // a 6 dB urban damping always pushes the error positive
    const double damped = distance_error(node, gw, {868.1, -(level + 6.0)});
    CHECK(damped > 0.0);
}
