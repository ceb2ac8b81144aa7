#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mobility/core/activity.hpp"
#include "mobility/core/geo.hpp"
#include "mobility/core/signal_power.hpp"
#include "mobility/core/time_of_day.hpp"

namespace mobility {

struct LocationSample {
  GeoPoint point;
  TimeOfDay time;
  std::optional<SignalPower> power;

  friend bool operator==(const LocationSample&, const LocationSample&) = default;
};

struct SegmentMetrics {
  double distance_m = 0.0;
  int duration_s = 0;
  double speed_kmh = 0.0;

  friend bool operator==(const SegmentMetrics&, const SegmentMetrics&) = default;
};

/// Raised for malformed segment text or samples that cannot form a segment.
class SegmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// km/h from meters and seconds; zero when no time elapsed.
[[nodiscard]] double speed_kmh(double distance_m, int duration_s) noexcept;

/// Path length, elapsed time (same-day with midnight rollover) and mean speed.
/// Throws SegmentError("insufficient samples") for fewer than two samples.
[[nodiscard]] SegmentMetrics segment_metrics(std::span<const LocationSample> samples);

/// Consecutive samples sharing one activity, with the metrics as recorded.
struct Segment {
  ActivityClass activity = ActivityClass::unknown;
  std::vector<LocationSample> locations;
  double distance_m = 0.0;
  int duration_s = 0;
  double speed_kmh = 0.0;
  TimeOfDay first_time;
  TimeOfDay last_time;

  [[nodiscard]] SegmentMetrics metrics() const { return {distance_m, duration_s, speed_kmh}; }

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Builds a segment from samples, computing its metrics.
/// Samples must be valid points whose times never go backwards except for
/// a single wrap past midnight.
[[nodiscard]] Segment make_segment(ActivityClass activity, std::vector<LocationSample> samples);

/// Result of reading a segment file: the segment with the metrics exactly as
/// stored in the file, plus the metrics recomputed from its samples.
struct ParsedSegment {
  Segment segment;
  SegmentMetrics recomputed;
  bool has_power = false;
};

/// Segment text in the client file format. With `include_power` every
/// location is emitted as a (lat, lon, time, power) quadruple; every sample
/// must then carry a power reading.
[[nodiscard]] std::string serialize_segment(const Segment& s, bool include_power);

/// Same as serialize_segment but wrapped as {"segments": [...]}.
[[nodiscard]] std::string serialize_segments(std::span<const Segment> segments, bool include_power);

/// Accepts a bare segment object or a {"segments": [...]} wrapper holding
/// exactly one segment.
[[nodiscard]] ParsedSegment parse_segment(std::string_view text);

/// Accepts a bare segment object or a wrapper with any number of segments.
[[nodiscard]] std::vector<ParsedSegment> parse_segments(std::string_view text);

namespace segment_keys {
inline constexpr std::string_view kActivity = "activity";
inline constexpr std::string_view kDistance = "distance (m)";
inline constexpr std::string_view kDuration = "duration (s)";
inline constexpr std::string_view kSpeed = "speed (Km\\h)";
inline constexpr std::string_view kFirstTime = "first time";
inline constexpr std::string_view kLastTime = "last time";
inline constexpr std::string_view kLocation = "location";
}  // namespace segment_keys

}  // namespace mobility
