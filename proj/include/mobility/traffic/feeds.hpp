#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mobility/core/date.hpp"
#include "mobility/core/geo.hpp"

namespace mobility::traffic {

class TrafficError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A skipped input line and why. Line numbers are 1-based.
struct FeedWarning {
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct ParseResult {
  std::vector<T> items;
  std::vector<FeedWarning> warnings;
};

inline constexpr int kMinState = 0;  // no data
inline constexpr int kMaxState = 6;  // closed

/// One line of the Barcelona state feed, "id#YYYYMMDDHHMMSS#current#predicted".
struct SectionState {
  int section_id = 0;
  DateTime at;
  int current = 0;
  int predicted_15min = 0;
};

/// Never throws on malformed text: bad lines become warnings.
[[nodiscard]] ParseResult<SectionState> parse_state_feed(std::string_view text);

/// Parses a geometry cell of "lon,lat,0" triples, splitting on ",0" as the
/// original client did. Points come back as (lat, lon). Throws TrafficError
/// naming the offending fragment.
[[nodiscard]] std::vector<GeoPoint> parse_section_coords(std::string_view cell);

/// Inverse of parse_section_coords: space-separated "lon,lat,0" triples.
[[nodiscard]] std::string render_section_coords(std::span<const GeoPoint> path);

struct RoadSection {
  int section_id = 0;
  std::string description;
  std::vector<GeoPoint> path;  // at least two points
};

/// ';'-separated sections sheet with header "Tram;Descripció;Coordenades".
/// Rows that do not yield a valid section are skipped with a warning.
[[nodiscard]] ParseResult<RoadSection> parse_sections_csv(std::string_view text);

/// Fixed state-to-colour table; throws TrafficError outside 0..6.
[[nodiscard]] std::string_view state_color(int state);
[[nodiscard]] std::string_view state_name(int state);

}  // namespace mobility::traffic
