#include "loratk/pathloss.hpp"

#include <cmath>
#include <stdexcept>

namespace loratk {

namespace {
constexpr double kEarthRadiusM = 6371000.0;
constexpr double kDegToRad = M_PI / 180.0;
}  // namespace

void GeoPoint::validate() const {
    if (lat_deg < -90.0 || lat_deg > 90.0)
        throw std::invalid_argument("latitude out of range");
    if (lon_deg < -180.0 || lon_deg > 180.0)
        throw std::invalid_argument("longitude out of range");
}

double estimate_distance(const SignalObservation& obs) {
    if (obs.freq_mhz <= 0.0)
        throw std::domain_error("carrier frequency must be positive");
    const double exponent =
        (27.55 - 20.0 * std::log10(obs.freq_mhz) + std::fabs(obs.level_db)) / 20.0;
    return std::pow(10.0, exponent);
}

double level_for_distance(double freq_mhz, double distance_m) {
    if (freq_mhz <= 0.0) throw std::domain_error("carrier frequency must be positive");
    if (distance_m <= 0.0) throw std::domain_error("distance must be positive");
    return 20.0 * std::log10(distance_m) + 20.0 * std::log10(freq_mhz) - 27.55;
}

double great_circle_distance(const GeoPoint& a, const GeoPoint& b) {
    a.validate();
    b.validate();
    const double lat1 = a.lat_deg * kDegToRad;
    const double lat2 = b.lat_deg * kDegToRad;
    const double dlat = (b.lat_deg - a.lat_deg) * kDegToRad;
    const double dlon = (b.lon_deg - a.lon_deg) * kDegToRad;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

double distance_error(const GeoPoint& node, const GeoPoint& gateway,
                      const SignalObservation& obs) {
    return estimate_distance(obs) - great_circle_distance(node, gateway);
}

}  // namespace loratk
