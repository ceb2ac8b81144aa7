#include "mobility/core/segment.hpp"

#include <cmath>
#include <json.hpp>

namespace mobility {

using ordered_json = nlohmann::ordered_json;

double speed_kmh(double distance_m, int duration_s) noexcept {
  return duration_s > 0 ? 3.6 * distance_m / static_cast<double>(duration_s) : 0.0;
}

SegmentMetrics segment_metrics(std::span<const LocationSample> samples) {
  if (samples.size() < 2) throw SegmentError("insufficient samples");
  double distance = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    distance += haversine_distance(samples[i - 1].point, samples[i].point);
  }
  const int duration = elapsed_seconds(samples.front().time, samples.back().time);
  return {distance, duration, speed_kmh(distance, duration)};
}

Segment make_segment(ActivityClass activity, std::vector<LocationSample> samples) {
  if (samples.size() < 2) throw SegmentError("insufficient samples");
  int wraps = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!is_valid(samples[i].point)) throw SegmentError("invalid coordinate at sample " + std::to_string(i));
    if (samples[i].power && !is_valid(*samples[i].power)) {
      throw SegmentError("invalid power at sample " + std::to_string(i));
    }
    if (i > 0 && samples[i].time < samples[i - 1].time) ++wraps;
  }
  if (wraps > 1) throw SegmentError("sample times go backwards");

  const auto m = segment_metrics(samples);
  Segment s;
  s.activity = activity;
  s.distance_m = m.distance_m;
  s.duration_s = m.duration_s;
  s.speed_kmh = m.speed_kmh;
  s.first_time = samples.front().time;
  s.last_time = samples.back().time;
  s.locations = std::move(samples);
  return s;
}

namespace {

ordered_json to_json(const Segment& s, bool include_power) {
  ordered_json j;
  j[std::string(segment_keys::kActivity)] = std::string(to_string(s.activity));
  j[std::string(segment_keys::kDistance)] = s.distance_m;
  j[std::string(segment_keys::kDuration)] = s.duration_s;
  j[std::string(segment_keys::kSpeed)] = s.speed_kmh;
  j[std::string(segment_keys::kFirstTime)] = s.first_time.to_string();
  j[std::string(segment_keys::kLastTime)] = s.last_time.to_string();
  auto loc = ordered_json::array();
  for (const auto& l : s.locations) {
    loc.push_back(l.point.lat);
    loc.push_back(l.point.lon);
    loc.push_back(l.time.to_string());
    if (include_power) {
      if (!l.power) throw std::invalid_argument("sample without power reading in a power-carrying segment");
      loc.push_back(to_string(*l.power));
    }
  }
  j[std::string(segment_keys::kLocation)] = std::move(loc);
  return j;
}

// Client files write the speed key as "Km\h" with a bare backslash, which is
// not a legal escape. Any backslash that does not start a valid escape is
// doubled so the key reads back as the literal text.
std::string repair_stray_backslashes(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 8);
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!in_string) {
      if (c == '"') in_string = true;
      out.push_back(c);
      continue;
    }
    if (c == '"') {
      in_string = false;
      out.push_back(c);
    } else if (c == '\\') {
      const char next = i + 1 < text.size() ? text[i + 1] : '\0';
      switch (next) {
        case '"': case '\\': case '/': case 'b': case 'f': case 'n': case 'r': case 't': case 'u':
          out.push_back(c);
          out.push_back(next);
          ++i;
          break;
        default:
          out += "\\\\";
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

double number_at(const ordered_json& arr, std::size_t i, const char* what) {
  const auto& v = arr[i];
  if (!v.is_number()) throw SegmentError(std::string("location entry ") + std::to_string(i) + ": " + what + " is not a number");
  return v.get<double>();
}

std::size_t detect_stride(const ordered_json& loc) {
  const std::size_t n = loc.size();
  if (n == 0) throw SegmentError("insufficient samples");
  if (n % 4 == 0) {
    bool all_power = true;
    for (std::size_t i = 3; i < n; i += 4) {
      if (!loc[i].is_string() || !looks_like_power_string(loc[i].get_ref<const std::string&>())) {
        all_power = false;
        break;
      }
    }
    if (all_power) return 4;
  }
  if (n % 3 == 0) return 3;
  throw SegmentError("stride mismatch: location array of length " + std::to_string(n));
}

ParsedSegment from_json(const ordered_json& j) {
  if (!j.is_object()) throw SegmentError("segment is not an object");
  const auto loc_it = j.find(segment_keys::kLocation);
  if (loc_it == j.end() || !loc_it->is_array()) throw SegmentError("missing \"location\" array");
  const auto& loc = *loc_it;
  const std::size_t stride = detect_stride(loc);

  std::vector<LocationSample> samples;
  samples.reserve(loc.size() / stride);
  for (std::size_t i = 0; i < loc.size(); i += stride) {
    LocationSample s;
    s.point = {number_at(loc, i, "latitude"), number_at(loc, i + 1, "longitude")};
    if (!is_valid(s.point)) throw SegmentError("location entry " + std::to_string(i) + ": coordinate out of range");
    if (!loc[i + 2].is_string()) throw SegmentError("location entry " + std::to_string(i + 2) + ": time is not a string");
    try {
      s.time = TimeOfDay::parse(loc[i + 2].get_ref<const std::string&>());
      if (stride == 4) s.power = parse_power_string(loc[i + 3].get_ref<const std::string&>());
    } catch (const std::invalid_argument& e) {
      throw SegmentError(e.what());
    }
    samples.push_back(s);
  }

  ActivityClass activity = ActivityClass::unknown;
  if (auto it = j.find(segment_keys::kActivity); it != j.end()) {
    if (!it->is_string()) throw SegmentError("\"activity\" is not a string");
    const auto& name = it->get_ref<const std::string&>();
    auto a = activity_from_string(name);
    if (!a) throw SegmentError("unknown activity \"" + name + "\"");
    activity = *a;
  }

  ParsedSegment out;
  Segment& seg = out.segment;
  seg = make_segment(activity, std::move(samples));
  out.recomputed = seg.metrics();
  out.has_power = stride == 4;

  if (auto it = j.find(segment_keys::kDistance); it != j.end()) {
    if (!it->is_number()) throw SegmentError("\"distance (m)\" is not a number");
    seg.distance_m = it->get<double>();
  }
  if (auto it = j.find(segment_keys::kDuration); it != j.end()) {
    if (!it->is_number()) throw SegmentError("\"duration (s)\" is not a number");
    seg.duration_s = it->is_number_integer() ? it->get<int>() : static_cast<int>(std::llround(it->get<double>()));
  }
  if (auto it = j.find(segment_keys::kSpeed); it != j.end()) {
    if (!it->is_number()) throw SegmentError("\"speed (Km\\h)\" is not a number");
    seg.speed_kmh = it->get<double>();
  } else {
    seg.speed_kmh = speed_kmh(seg.distance_m, seg.duration_s);
  }

  auto check_time = [&](std::string_view key, TimeOfDay expected) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_string()) throw SegmentError("\"" + std::string(key) + "\" is not a string");
    TimeOfDay t;
    try {
      t = TimeOfDay::parse(it->get_ref<const std::string&>());
    } catch (const std::invalid_argument& e) {
      throw SegmentError(e.what());
    }
    if (t != expected) throw SegmentError("\"" + std::string(key) + "\" does not match the samples");
  };
  check_time(segment_keys::kFirstTime, seg.first_time);
  check_time(segment_keys::kLastTime, seg.last_time);
  return out;
}

ordered_json parse_json(std::string_view text) {
  try {
    return ordered_json::parse(repair_stray_backslashes(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw SegmentError(std::string("malformed segment text: ") + e.what());
  }
}

}  // namespace

std::string serialize_segment(const Segment& s, bool include_power) {
  return to_json(s, include_power).dump(2);
}

std::string serialize_segments(std::span<const Segment> segments, bool include_power) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : segments) arr.push_back(to_json(s, include_power));
  ordered_json j;
  j["segments"] = std::move(arr);
  return j.dump(2);
}

std::vector<ParsedSegment> parse_segments(std::string_view text) {
  const auto j = parse_json(text);
  std::vector<ParsedSegment> out;
  if (j.is_object() && j.contains("segments")) {
    const auto& arr = j["segments"];
    if (!arr.is_array()) throw SegmentError("\"segments\" is not an array");
    for (const auto& item : arr) out.push_back(from_json(item));
  } else {
    out.push_back(from_json(j));
  }
  return out;
}

ParsedSegment parse_segment(std::string_view text) {
  auto all = parse_segments(text);
  if (all.size() != 1) {
    throw SegmentError("expected exactly one segment, found " + std::to_string(all.size()));
  }
  return std::move(all.front());
}

}  // namespace mobility
