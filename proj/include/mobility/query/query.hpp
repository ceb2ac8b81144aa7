#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mobility/core/geo.hpp"
#include "mobility/store/store.hpp"

namespace mobility::query {

inline constexpr std::string_view kMissingFields = "All fields must be filled out";
inline constexpr std::string_view kNoMarkers = "No se ha encontrado ningun marcador";
inline constexpr std::string_view kCsvHeader = "seg_id,activity,lat,lon,date,time";
inline constexpr int kMinAge = 14;
inline constexpr int kMaxAge = 99;

/// Map colour per activity name; unknown names get the default colour.
[[nodiscard]] std::string_view activity_color(std::string_view activity) noexcept;

struct Polyline {
  std::int64_t seg_id = 0;
  std::string activity;
  std::string color;
  std::vector<GeoPoint> points;
};

struct Marker {
  GeoPoint point;
  std::int64_t seg_id = 0;
  std::string activity;
  std::string date;
  std::string time;
};

struct MapPayload {
  std::vector<Polyline> polylines;
  std::vector<Marker> markers;  // first and last location of each polyline
};

/// Groups runs of equal seg_id into polylines without reordering rows.
[[nodiscard]] MapPayload build_map_payload(std::span<const store::QueryRow> rows);

/// GeoJSON FeatureCollection. Segments are LineStrings (a lone location is a
/// Point); markers are Points. An empty payload carries the no-marker message.
[[nodiscard]] nlohmann::ordered_json to_geojson(const MapPayload& payload);

/// Header plus one RFC 4180 record per row, CRLF-terminated.
[[nodiscard]] std::string export_csv(std::span<const store::QueryRow> rows);
[[nodiscard]] std::string csv_field(std::string_view value);

enum class Format { map, csv };

/// A request rejected before touching the store.
class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QueryRequest {
  store::LocationFilter filter;
  Format format = Format::map;
};

/// Looks a request parameter up by name; nullopt when absent.
using ParamLookup = std::function<std::optional<std::string>(std::string_view)>;

/// Reads age_min, age_max, activity, from, to and format. The original form
/// names (edad, edad2, actividad, dtp_input1, dtp_input2) are accepted too.
/// Missing or blank fields throw QueryError(kMissingFields); other invalid
/// values throw QueryError with a specific message.
[[nodiscard]] QueryRequest parse_query_request(const ParamLookup& param);

struct HttpReply {
  int status = 200;
  std::string content_type;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

/// The whole /query endpoint minus transport.
[[nodiscard]] HttpReply handle_query(const store::Store& store, const ParamLookup& param, int reference_year);

/// {"activities": ["All", ...distinct stored activities]}.
[[nodiscard]] HttpReply handle_activities(const store::Store& store);

}  // namespace mobility::query
