#ifndef LORATK_PATHLOSS_HPP
#define LORATK_PATHLOSS_HPP

namespace loratk {

/// One received signal sample; level_db is negative for real receptions.
struct SignalObservation {
    double freq_mhz;
    double level_db;
};

struct GeoPoint {
    double lat_deg;
    double lon_deg;

    /// Throws std::invalid_argument outside [-90,90] x [-180,180].
    void validate() const;
};

/// Free-space path-loss distance estimate in meters:
/// 10^((27.55 - 20 log10(f) + |s|) / 20).
/// Throws std::domain_error for non-positive frequency.
double estimate_distance(const SignalObservation& obs);

/// Signal level magnitude (dB) that estimate_distance maps back to d meters.
double level_for_distance(double freq_mhz, double distance_m);

/// Haversine distance in meters on a sphere of radius 6371 km.
double great_circle_distance(const GeoPoint& a, const GeoPoint& b);

/// Estimated minus measured distance; positive means overestimation.
double distance_error(const GeoPoint& node, const GeoPoint& gateway,
                      const SignalObservation& obs);

}  // namespace loratk

#endif
