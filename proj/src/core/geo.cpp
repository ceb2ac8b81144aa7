#include "mobility/core/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mobility {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

GeoPoint make_geo_point(double lat, double lon) {
  GeoPoint p{lat, lon};
  if (!is_valid(p)) {
    std::ostringstream os;
    os << "coordinate out of range: (" << lat << ", " << lon << ")";
    throw std::invalid_argument(os.str());
  }
  return p;
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;

  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  // rounding can push h a hair past 1 for antipodes
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

}  // namespace mobility
