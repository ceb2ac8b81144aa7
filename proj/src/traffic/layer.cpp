#include "mobility/traffic/layer.hpp"

#include <unordered_map>

namespace mobility::traffic {

TrafficLayer join_traffic_map(std::span<const RoadSection> sections, std::span<const SectionState> states,
                              std::span<const Incidence> incidences) {
  // latest reading per section; later lines win ties
  std::unordered_map<int, const SectionState*> latest;
  for (const auto& s : states) {
    auto& slot = latest[s.section_id];
    if (slot == nullptr || !(s.at < slot->at)) slot = &s;
  }

  TrafficLayer layer;
  for (const auto& section : sections) {
    if (section.path.size() < 2) continue;
    TrafficPolyline line{section.section_id, section.description, section.path, kMinState, kMinState, {}};
    if (const auto it = latest.find(section.section_id); it != latest.end()) {
      line.state = it->second->current;
      line.predicted = it->second->predicted_15min;
    }
    line.color = std::string(state_color(line.state));
    layer.polylines.push_back(std::move(line));
  }
  layer.markers.assign(incidences.begin(), incidences.end());
  return layer;
}

nlohmann::ordered_json to_geojson(const TrafficLayer& layer) {
  using nlohmann::ordered_json;
  ordered_json features = ordered_json::array();
  for (const auto& p : layer.polylines) {
    ordered_json coords = ordered_json::array();
    for (const auto& g : p.path) coords.push_back({g.lon, g.lat});
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
                        {"properties",
                         {{"kind", "section"},
                          {"section_id", p.section_id},
                          {"description", p.description},
                          {"state", p.state},
                          {"state_name", state_name(p.state)},
                          {"predicted", p.predicted},
                          {"stroke", p.color}}}});
  }
  for (const auto& m : layer.markers) {
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {m.point.lon, m.point.lat}}}},
                        {"properties",
                         {{"kind", "incidence"},
                          {"title", "Incidencia"},
                          {"description", m.description},
                          {"icon", m.icon_url()}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

TextSource file_source(std::filesystem::path path) {
  return [path = std::move(path)] { return read_text_file(path); };
}

TextSource http_source(std::string url) {
  return [url = std::move(url)] { return http_get_text(url); };
}

TrafficService::TrafficService(TrafficSources sources, std::chrono::seconds refresh_interval)
    : sources_(std::move(sources)), interval_(refresh_interval) {}

std::shared_ptr<const TrafficSnapshot> TrafficService::current() {
  {
    std::lock_guard lock(mu_);
    if (snapshot_ && std::chrono::steady_clock::now() - snapshot_->fetched_at < interval_) return snapshot_;
  }
  return refresh();
}

std::shared_ptr<const TrafficSnapshot> TrafficService::refresh() {
  std::lock_guard lock(mu_);
  auto snap = std::make_shared<TrafficSnapshot>();
  const auto note = [&](const std::string& feed, const std::vector<FeedWarning>& ws) {
    for (const auto& w : ws) snap->warnings.push_back(feed + " line " + std::to_string(w.line) + ": " + w.message);
  };

  if (sources_.sections) {
    try {
      auto parsed = parse_sections_csv(sources_.sections());
      note("sections", parsed.warnings);
      sections_ = std::move(parsed.items);
    } catch (const std::exception& e) {
      snap->warnings.push_back(std::string("sections unavailable: ") + e.what());
    }
  }
  if (sources_.states) {
    try {
      auto parsed = parse_state_feed(sources_.states());
      note("states", parsed.warnings);
      states_ = std::move(parsed.items);
    } catch (const std::exception& e) {
      snap->warnings.push_back(std::string("states unavailable: ") + e.what());
    }
  }
  if (sources_.incidences) {
    auto parsed = fetch_incidences(*sources_.incidences);
    note("incidences", parsed.warnings);
    // an unreachable source yields no items and a line-0 warning
    if (!parsed.items.empty() || parsed.warnings.empty() || parsed.warnings.front().line != 0) {
      incidences_ = std::move(parsed.items);
    }
  }

  snap->layer = join_traffic_map(sections_, states_, incidences_);
  snap->fetched_at = std::chrono::steady_clock::now();
  snapshot_ = snap;
  return snapshot_;
}

}  // namespace mobility::traffic
