#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mobility/core/activity.hpp"
#include "mobility/core/segment.hpp"

namespace mobility::activity {

enum class PoiKind { bus, tram, train, metro_entrance };

[[nodiscard]] std::string_view to_string(PoiKind k) noexcept;
[[nodiscard]] std::optional<PoiKind> poi_kind_from_string(std::string_view name) noexcept;

struct Poi {
  GeoPoint point;
  PoiKind kind;
};

/// Read-only set of transit stops.
class PoiIndex {
 public:
  PoiIndex() = default;
  explicit PoiIndex(std::vector<Poi> stops) : stops_(std::move(stops)) {}

  /// "kind,lat,lon" lines; blank lines, '#' comments and a header row are
  /// skipped. Throws std::runtime_error naming the offending line.
  static PoiIndex from_csv(std::istream& in);
  static PoiIndex load(const std::filesystem::path& path);

  /// Closest stop of `kind` within `radius_m` of `p`.
  [[nodiscard]] std::optional<Poi> nearest(PoiKind kind, const GeoPoint& p, double radius_m) const;

  [[nodiscard]] const std::vector<Poi>& stops() const noexcept { return stops_; }

 private:
  std::vector<Poi> stops_;
};

class RouteOracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Answers whether a transit line of a given kind connects two stops.
class RouteOracle {
 public:
  virtual ~RouteOracle() = default;
  /// Throws RouteOracleError when the answer cannot be obtained.
  [[nodiscard]] virtual bool has_route(PoiKind kind, const GeoPoint& from, const GeoPoint& to) const = 0;
};

/// Table-driven oracle loaded from "kind,lat1,lon1,lat2,lon2,exists" lines.
/// Pairs are matched in either direction; unlisted pairs have no route.
class TableRouteOracle final : public RouteOracle {
 public:
  struct Entry {
    PoiKind kind;
    GeoPoint a;
    GeoPoint b;
    bool exists;
  };

  TableRouteOracle() = default;
  explicit TableRouteOracle(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  static TableRouteOracle from_csv(std::istream& in);
  static TableRouteOracle load(const std::filesystem::path& path);

  [[nodiscard]] bool has_route(PoiKind kind, const GeoPoint& from, const GeoPoint& to) const override;

 private:
  std::vector<Entry> entries_;
};

struct RefineConfig {
  /// Median reported accuracy above this marks an underground ride.
  double metro_accuracy_m = 100.0;
  /// Distance from a window endpoint to a stop that counts as "at the stop".
  double poi_radius_m = 50.0;
};

/// Upgrades a recognizer class to a transport mode.
///  - metro when the window's median GPS accuracy exceeds the threshold;
///  - bus/tram/train when both window endpoints sit at distinct stops of that
///    kind and the oracle confirms a route between them.
/// Only still, vehicle and unknown are refined; an oracle failure just skips
/// the stop heuristic. `accuracy_m` must be aligned with `window`.
[[nodiscard]] ActivityClass refine_activity(ActivityClass base, std::span<const LocationSample> window,
                                            std::span<const double> accuracy_m, const PoiIndex& poi,
                                            const RouteOracle* oracle, const RefineConfig& config = {});

}  // namespace mobility::activity
