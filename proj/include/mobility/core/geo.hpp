#pragma once

#include <stdexcept>
#include <string>

namespace mobility {

/// Mean Earth radius used for every distance in the platform.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// WGS84 position in decimal degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

[[nodiscard]] bool is_valid(const GeoPoint& p) noexcept;

/// Builds a point, throwing std::invalid_argument when out of range.
[[nodiscard]] GeoPoint make_geo_point(double lat, double lon);

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
[[nodiscard]] double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

}  // namespace mobility
