#include "mobility/activity/refine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

namespace mobility::activity {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto c = line.find(',', start);
    out.push_back(trim(line.substr(start, c - start)));
    if (c == std::string_view::npos) break;
    start = c + 1;
  }
  return out;
}

double to_double(std::string_view s, int line_no) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": not a number \"" + std::string(s) + "\"");
  }
  return v;
}

GeoPoint to_point(std::string_view lat, std::string_view lon, int line_no) {
  GeoPoint p{to_double(lat, line_no), to_double(lon, line_no)};
  if (!is_valid(p)) throw std::runtime_error("line " + std::to_string(line_no) + ": coordinate out of range");
  return p;
}

PoiKind to_kind(std::string_view s, int line_no) {
  auto k = poi_kind_from_string(s);
  if (!k) throw std::runtime_error("line " + std::to_string(line_no) + ": unknown stop kind \"" + std::string(s) + "\"");
  return *k;
}

// Calls fn(fields, line_no) for every data line.
template <typename Fn>
void for_each_record(std::istream& in, std::size_t columns, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_commas(t);
    if (line_no == 1 && fields.front() == "kind") continue;
    if (fields.size() != columns) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                               " fields, got " + std::to_string(fields.size()));
    }
    fn(fields, line_no);
  }
}

bool same_place(const GeoPoint& a, const GeoPoint& b) {
  return std::abs(a.lat - b.lat) < 1e-6 && std::abs(a.lon - b.lon) < 1e-6;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string_view to_string(PoiKind k) noexcept {
  switch (k) {
    case PoiKind::bus: return "bus";
    case PoiKind::tram: return "tram";
    case PoiKind::train: return "train";
    case PoiKind::metro_entrance: return "metro_entrance";
  }
  return "bus";
}

std::optional<PoiKind> poi_kind_from_string(std::string_view name) noexcept {
  for (auto k : {PoiKind::bus, PoiKind::tram, PoiKind::train, PoiKind::metro_entrance}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

PoiIndex PoiIndex::from_csv(std::istream& in) {
  std::vector<Poi> stops;
  for_each_record(in, 3, [&](const auto& f, int line_no) {
    stops.push_back({to_point(f[1], f[2], line_no), to_kind(f[0], line_no)});
  });
  return PoiIndex(std::move(stops));
}

PoiIndex PoiIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return from_csv(in);
}

std::optional<Poi> PoiIndex::nearest(PoiKind kind, const GeoPoint& p, double radius_m) const {
  std::optional<Poi> best;
  double best_d = radius_m;
  for (const auto& s : stops_) {
    if (s.kind != kind) continue;
    const double d = haversine_distance(s.point, p);
    if (d <= best_d) {
      best_d = d;
      best = s;
    }
  }
  return best;
}

TableRouteOracle TableRouteOracle::from_csv(std::istream& in) {
  std::vector<Entry> entries;
  for_each_record(in, 6, [&](const auto& f, int line_no) {
    bool exists = false;
    if (f[5] == "1" || f[5] == "true" || f[5] == "yes") {
      exists = true;
    } else if (f[5] != "0" && f[5] != "false" && f[5] != "no") {
      throw std::runtime_error("line " + std::to_string(line_no) + ": bad exists flag \"" + std::string(f[5]) + "\"");
    }
    entries.push_back({to_kind(f[0], line_no), to_point(f[1], f[2], line_no), to_point(f[3], f[4], line_no), exists});
  });
  return TableRouteOracle(std::move(entries));
}

TableRouteOracle TableRouteOracle::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return from_csv(in);
}

bool TableRouteOracle::has_route(PoiKind kind, const GeoPoint& from, const GeoPoint& to) const {
  for (const auto& e : entries_) {
    if (e.kind != kind) continue;
    if ((same_place(e.a, from) && same_place(e.b, to)) || (same_place(e.a, to) && same_place(e.b, from))) {
      return e.exists;
    }
  }
  return false;
}

ActivityClass refine_activity(ActivityClass base, std::span<const LocationSample> window,
                              std::span<const double> accuracy_m, const PoiIndex& poi, const RouteOracle* oracle,
                              const RefineConfig& config) {
  if (base != ActivityClass::vehicle && base != ActivityClass::unknown && base != ActivityClass::still) return base;
  if (accuracy_m.size() != window.size()) {
    throw std::invalid_argument("accuracy list is not aligned with the window");
  }

  if (!accuracy_m.empty() &&
      median(std::vector<double>(accuracy_m.begin(), accuracy_m.end())) > config.metro_accuracy_m) {
    return ActivityClass::metro;
  }

  if (window.size() < 2 || oracle == nullptr) return base;
  const auto& first = window.front().point;
  const auto& last = window.back().point;
  constexpr std::pair<PoiKind, ActivityClass> kModes[] = {
      {PoiKind::bus, ActivityClass::bus}, {PoiKind::tram, ActivityClass::tram}, {PoiKind::train, ActivityClass::train}};
  for (auto [kind, cls] : kModes) {
    const auto from = poi.nearest(kind, first, config.poi_radius_m);
    const auto to = poi.nearest(kind, last, config.poi_radius_m);
    if (!from || !to || same_place(from->point, to->point)) continue;
    try {
      if (oracle->has_route(kind, from->point, to->point)) return cls;
    } catch (const std::exception&) {
      return base;
    }
  }
  return base;
}

}  // namespace mobility::activity
