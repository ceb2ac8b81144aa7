#include "mobility/traffic/feeds.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace mobility::traffic {

namespace {

constexpr std::array<std::string_view, 7> kStateColors = {"#9E9E9E", "#1B5E20", "#4CAF50", "#FF9800",
                                                          "#F44336", "#B71C1C", "#000000"};
constexpr std::array<std::string_view, 7> kStateNames = {"no data", "very fluid", "fluid",  "dense",
                                                         "very dense", "congested", "closed"};

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  auto lines = split(text, "\n");
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return lines;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_state_code(std::string_view s, int& out) {
  return parse_number(s, out) && out >= kMinState && out <= kMaxState;
}

bool parse_compact_timestamp(std::string_view s, DateTime& out) {
  if (s.size() != 14) return false;
  for (const char c : s) {
    if (c < '0' || c > '9') return false;
  }
  const std::string iso = std::string(s.substr(0, 4)) + "-" + std::string(s.substr(4, 2)) + "-" +
                          std::string(s.substr(6, 2)) + "T" + std::string(s.substr(8, 2)) + ":" +
                          std::string(s.substr(10, 2)) + ":" + std::string(s.substr(12, 2));
  try {
    out = parse_iso_datetime(iso);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

std::string unquote(std::string_view field) {
  field = trim(field);
  if (field.size() < 2 || field.front() != '"' || field.back() != '"') return std::string(field);
  std::string out;
  field = field.substr(1, field.size() - 2);
  for (std::size_t i = 0; i < field.size(); ++i) {
    out.push_back(field[i]);
    if (field[i] == '"' && i + 1 < field.size() && field[i + 1] == '"') ++i;
  }
  return out;
}

}  // namespace

ParseResult<SectionState> parse_state_feed(std::string_view text) {
  ParseResult<SectionState> result;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto warn = [&](std::string msg) { result.warnings.push_back({i + 1, std::move(msg)}); };
    const auto fields = split(line, "#");
    if (fields.size() != 4) {
      warn("expected 4 '#'-separated fields, got " + std::to_string(fields.size()));
      continue;
    }
    SectionState s;
    if (!parse_number(fields[0], s.section_id) || s.section_id <= 0) {
      warn("bad section id \"" + std::string(fields[0]) + "\"");
      continue;
    }
    if (!parse_compact_timestamp(fields[1], s.at)) {
      warn("bad timestamp \"" + std::string(fields[1]) + "\"");
      continue;
    }
    if (!parse_state_code(fields[2], s.current) || !parse_state_code(fields[3], s.predicted_15min)) {
      warn("state outside 0..6");
      continue;
    }
    result.items.push_back(s);
  }
  return result;
}

std::vector<GeoPoint> parse_section_coords(std::string_view cell) {
  std::vector<GeoPoint> path;
  for (const auto raw : split(cell, ",0")) {
    const auto fragment = trim(raw);
    if (fragment.empty()) continue;
    const auto parts = split(fragment, ",");
    double lon = 0.0;
    double lat = 0.0;
    if (parts.size() != 2 || !parse_number(trim(parts[0]), lon) || !parse_number(trim(parts[1]), lat)) {
      throw TrafficError("bad coordinate fragment \"" + std::string(fragment) + "\"");
    }
    try {
      path.push_back(make_geo_point(lat, lon));
    } catch (const std::invalid_argument&) {
      throw TrafficError("coordinate out of range \"" + std::string(fragment) + "\"");
    }
  }
  return path;
}

std::string render_section_coords(std::span<const GeoPoint> path) {
  std::string out;
  char buf[32];
  for (const auto& p : path) {
    if (!out.empty()) out.push_back(' ');
    auto r = std::to_chars(buf, buf + sizeof buf, p.lon);
    out.append(buf, r.ptr);
    out.push_back(',');
    r = std::to_chars(buf, buf + sizeof buf, p.lat);
    out.append(buf, r.ptr);
    out.append(",0");
  }
  return out;
}

ParseResult<RoadSection> parse_sections_csv(std::string_view text) {
  ParseResult<RoadSection> result;
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  const auto lines = lines_of(text);
  bool seen_first = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto fields = split(line, ";");
    if (!seen_first) {
      seen_first = true;
      if (unquote(fields[0]) == "Tram") continue;
    }
    const auto warn = [&](std::string msg) { result.warnings.push_back({i + 1, std::move(msg)}); };
    if (fields.size() < 3) {
      warn("expected 3 ';'-separated fields");
      continue;
    }
    RoadSection s;
    if (!parse_number(unquote(fields[0]), s.section_id) || s.section_id <= 0) {
      warn("bad section id \"" + std::string(fields[0]) + "\"");
      continue;
    }
    // a description may itself contain ';'
    std::string desc;
    for (std::size_t f = 1; f + 1 < fields.size(); ++f) {
      if (f > 1) desc.push_back(';');
      desc.append(fields[f]);
    }
    s.description = unquote(desc);
    try {
      s.path = parse_section_coords(unquote(fields.back()));
    } catch (const TrafficError& e) {
      warn(e.what());
      continue;
    }
    if (s.path.size() < 2) {
      warn("section " + std::to_string(s.section_id) + " has fewer than two points");
      continue;
    }
    result.items.push_back(std::move(s));
  }
  return result;
}

std::string_view state_color(int state) {
  if (state < kMinState || state > kMaxState) throw TrafficError("state outside 0..6: " + std::to_string(state));
  return kStateColors[static_cast<std::size_t>(state)];
}

std::string_view state_name(int state) {
  if (state < kMinState || state > kMaxState) throw TrafficError("state outside 0..6: " + std::to_string(state));
  return kStateNames[static_cast<std::size_t>(state)];
}

}  // namespace mobility::traffic
