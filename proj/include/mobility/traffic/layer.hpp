#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mobility/traffic/feeds.hpp"
#include "mobility/traffic/incidences.hpp"

namespace mobility::traffic {

struct TrafficPolyline {
  int section_id = 0;
  std::string description;
  std::vector<GeoPoint> path;
  int state = 0;
  int predicted = 0;
  std::string color;
};

struct TrafficLayer {
  std::vector<TrafficPolyline> polylines;
  std::vector<Incidence> markers;
};

/// Left join of sections with their latest state. Sections without a state
/// are drawn as "no data"; sections with fewer than two points are dropped.
[[nodiscard]] TrafficLayer join_traffic_map(std::span<const RoadSection> sections,
                                            std::span<const SectionState> states,
                                            std::span<const Incidence> incidences);

/// FeatureCollection of LineString sections (with a "stroke" colour) and
/// Point incidences.
[[nodiscard]] nlohmann::ordered_json to_geojson(const TrafficLayer& layer);

using TextSource = std::function<std::string()>;

[[nodiscard]] TextSource file_source(std::filesystem::path path);
[[nodiscard]] TextSource http_source(std::string url);

struct TrafficSources {
  TextSource states;
  TextSource sections;
  std::shared_ptr<IncidenceSource> incidences;  // optional
};

struct TrafficSnapshot {
  TrafficLayer layer;
  std::vector<std::string> warnings;
  std::chrono::steady_clock::time_point fetched_at;
};

/// Keeps the latest joined layer, refetching lazily once it is older than
/// the refresh interval. Readers get an immutable snapshot. A failed fetch
/// keeps the previous data for that feed and records a warning.
class TrafficService {
 public:
  explicit TrafficService(TrafficSources sources,
                          std::chrono::seconds refresh_interval = std::chrono::minutes(5));

  [[nodiscard]] std::shared_ptr<const TrafficSnapshot> current();
  std::shared_ptr<const TrafficSnapshot> refresh();

 private:
  TrafficSources sources_;
  std::chrono::seconds interval_;
  std::mutex mu_;
  std::vector<RoadSection> sections_;
  std::vector<SectionState> states_;
  std::vector<Incidence> incidences_;
  std::shared_ptr<const TrafficSnapshot> snapshot_;
};

}  // namespace mobility::traffic
