#include "mobility/query/query.hpp"

#include <charconv>

namespace mobility::query {

namespace {

std::string number_text(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string envelope(int success, std::string_view message) {
  nlohmann::ordered_json j;
  j["success"] = success;
  j["message"] = message;
  return j.dump();
}

nlohmann::ordered_json point_feature(const Marker& m, std::string_view kind) {
  return {{"type", "Feature"},
          {"geometry", {{"type", "Point"}, {"coordinates", {m.point.lon, m.point.lat}}}},
          {"properties",
           {{"kind", kind},
            {"seg_id", m.seg_id},
            {"activity", m.activity},
            {"color", activity_color(m.activity)},
            {"date", m.date},
            {"time", m.time}}}};
}

std::optional<std::string> first_present(const ParamLookup& param, std::string_view name, std::string_view alias) {
  auto v = param(name);
  if (!v || v->empty()) v = param(alias);
  if (!v || v->empty()) return std::nullopt;
  return v;
}

int parse_age(const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw QueryError("age must be an integer");
  if (v < kMinAge || v > kMaxAge) throw QueryError("age must be between 14 and 99");
  return v;
}

}  // namespace

std::string_view activity_color(std::string_view activity) noexcept {
  if (activity == "still") return "#FF00FF";
  if (activity == "on_foot") return "#FF9900";
  if (activity == "vehicle") return "#333300";
  if (activity == "bicycle") return "#00FF00";
  if (activity == "bus") return "#0099CC";
  return "#3e8bff";
}

MapPayload build_map_payload(std::span<const store::QueryRow> rows) {
  MapPayload payload;
  const store::QueryRow* run_first = nullptr;
  const store::QueryRow* run_last = nullptr;
  const auto close_run = [&] {
    if (run_first == nullptr) return;
    payload.markers.push_back({{run_first->lat, run_first->lon}, run_first->seg_id, run_first->activity,
                               run_first->date, run_first->time});
    if (run_last != run_first) {
      payload.markers.push_back(
          {{run_last->lat, run_last->lon}, run_last->seg_id, run_last->activity, run_last->date, run_last->time});
    }
  };
  for (const auto& row : rows) {
    if (run_first == nullptr || row.seg_id != run_first->seg_id) {
      close_run();
      payload.polylines.push_back({row.seg_id, row.activity, std::string(activity_color(row.activity)), {}});
      run_first = &row;
    }
    payload.polylines.back().points.push_back({row.lat, row.lon});
    run_last = &row;
  }
  close_run();
  return payload;
}

nlohmann::ordered_json to_geojson(const MapPayload& payload) {
  using nlohmann::ordered_json;
  ordered_json features = ordered_json::array();
  for (const auto& p : payload.polylines) {
    ordered_json geometry;
    if (p.points.size() == 1) {
      geometry = {{"type", "Point"}, {"coordinates", {p.points[0].lon, p.points[0].lat}}};
    } else {
      ordered_json coords = ordered_json::array();
      for (const auto& g : p.points) coords.push_back({g.lon, g.lat});
      geometry = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
    }
    features.push_back({{"type", "Feature"},
                        {"geometry", std::move(geometry)},
                        {"properties", {{"kind", "segment"}, {"seg_id", p.seg_id}, {"activity", p.activity},
                                        {"color", p.color}}}});
  }
  for (const auto& m : payload.markers) features.push_back(point_feature(m, "marker"));
  ordered_json out = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  if (payload.polylines.empty()) out["message"] = kNoMarkers;
  return out;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string export_csv(std::span<const store::QueryRow> rows) {
  std::string out(kCsvHeader);
  out += "\r\n";
  for (const auto& r : rows) {
    out += std::to_string(r.seg_id);
    out += ',';
    out += csv_field(r.activity);
    out += ',';
    out += number_text(r.lat);
    out += ',';
    out += number_text(r.lon);
    out += ',';
    out += csv_field(r.date);
    out += ',';
    out += csv_field(r.time);
    out += "\r\n";
  }
  return out;
}

QueryRequest parse_query_request(const ParamLookup& param) {
  const auto age_min = first_present(param, "age_min", "edad");
  const auto age_max = first_present(param, "age_max", "edad2");
  const auto activity = first_present(param, "activity", "actividad");
  const auto from = first_present(param, "from", "dtp_input1");
  const auto to = first_present(param, "to", "dtp_input2");
  if (!age_min || !age_max || !activity || !from || !to) throw QueryError(std::string(kMissingFields));

  QueryRequest req;
  req.filter.age_min = parse_age(*age_min);
  req.filter.age_max = parse_age(*age_max);
  req.filter.activity = *activity;
  try {
    req.filter.from = parse_iso_datetime(*from, false);
    req.filter.to = parse_iso_datetime(*to, true);
  } catch (const std::invalid_argument&) {
    throw QueryError("dates must be ISO 8601");
  }
  if (req.filter.age_min > req.filter.age_max) throw QueryError("age range is inverted");
  if (req.filter.to < req.filter.from) throw QueryError("date range is inverted");

  // the original form had one button per output
  const auto format = param("format");
  if (!format || format->empty() || *format == "map") {
    req.format = param("submit_csv") ? Format::csv : Format::map;
  } else if (*format == "csv") {
    req.format = Format::csv;
  } else {
    throw QueryError("format must be map or csv");
  }
  return req;
}

HttpReply handle_query(const store::Store& store, const ParamLookup& param, int reference_year) {
  QueryRequest req;
  try {
    req = parse_query_request(param);
  } catch (const QueryError& e) {
    return {400, "application/json", envelope(0, e.what()), {}};
  }
  const auto rows = store.query_locations(req.filter, reference_year);
  if (req.format == Format::csv) {
    HttpReply reply{200, "text/csv; charset=utf-8", export_csv(rows),
                    {{"Content-Disposition", "attachment; filename=\"locations.csv\""}}};
    if (rows.empty()) reply.headers.emplace_back("X-Mobility-Message", std::string(kNoMarkers));
    return reply;
  }
  return {200, "application/geo+json", to_geojson(build_map_payload(rows)).dump(), {}};
}

HttpReply handle_activities(const store::Store& store) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array({store::kAllActivities});
  for (const auto& a : store.distinct_activities()) list.push_back(a);
  return {200, "application/json", nlohmann::ordered_json{{"activities", std::move(list)}}.dump(), {}};
}

}  // namespace mobility::query
