#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "mobility/query/query.hpp"

using namespace mobility;
using namespace mobility::query;
using store::QueryRow;

namespace {

ParamLookup params(std::map<std::string, std::string> m) {
  return [m = std::move(m)](std::string_view k) -> std::optional<std::string> {
    const auto it = m.find(std::string(k));
    if (it == m.end()) return std::nullopt;
    return it->second;
  };
}

std::map<std::string, std::string> full_form() {
  return {{"age_min", "14"}, {"age_max", "99"}, {"activity", "All"}, {"from", "2015-06-01"}, {"to", "2015-06-30"}};
}

QueryRow row(std::int64_t seg, double lat, double lon, const char* act = "vehicle") {
  return {lat, lon, "10:00:00", "2015-06-10", act, seg, 0};
}

using Key = std::tuple<double, double, std::int64_t>;

std::vector<Key> keys_from_geojson(const nlohmann::ordered_json& geo) {
  std::vector<Key> out;
  for (const auto& f : geo["features"]) {
    if (f["properties"]["kind"] != "segment") continue;
    const auto seg = f["properties"]["seg_id"].get<std::int64_t>();
    if (f["geometry"]["type"] == "Point") {
      out.emplace_back(f["geometry"]["coordinates"][1].get<double>(), f["geometry"]["coordinates"][0].get<double>(), seg);
      continue;
    }
    for (const auto& c : f["geometry"]["coordinates"]) out.emplace_back(c[1].get<double>(), c[0].get<double>(), seg);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// deliberately naive reader: the test data never needs quoting
std::vector<Key> keys_from_csv(const std::string& csv) {
  std::vector<Key> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    out.emplace_back(std::stod(f[2]), std::stod(f[3]), std::stoll(f[0]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("activity colours") {
  CHECK(activity_color("still") == "#FF00FF");
  CHECK(activity_color("on_foot") == "#FF9900");
  CHECK(activity_color("vehicle") == "#333300");
  CHECK(activity_color("bicycle") == "#00FF00");
  CHECK(activity_color("bus") == "#0099CC");
  for (const auto a : kAllActivities) CHECK(activity_color(to_string(a)).size() == 7);
  CHECK(activity_color("tram") == "#3e8bff");
  CHECK(activity_color("") == "#3e8bff");
}

TEST_CASE("one vehicle segment gives one polyline and two markers") {
  const std::vector<QueryRow> rows{row(7, 41.1, 2.1), row(7, 41.2, 2.2), row(7, 41.3, 2.3)};
  const auto p = build_map_payload(rows);
  REQUIRE(p.polylines.size() == 1);
  CHECK(p.polylines[0].color == "#333300");
  CHECK(p.polylines[0].points.size() == 3);
  REQUIRE(p.markers.size() == 2);
  CHECK(p.markers[0].point == GeoPoint{41.1, 2.1});
  CHECK(p.markers[1].point == GeoPoint{41.3, 2.3});
  const auto geo = to_geojson(p);
  CHECK_FALSE(geo.contains("message"));
  CHECK(geo["features"][0]["geometry"]["type"] == "LineString");
  CHECK(geo["features"][0]["properties"]["color"] == "#333300");
  CHECK(geo["features"][1]["properties"]["kind"] == "marker");
}

TEST_CASE("grouping partitions rows without reordering") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<QueryRow> rows;
    const int n = static_cast<int>(rng() % 40);
    std::int64_t seg = 1;
    for (int i = 0; i < n; ++i) {
      if (rng() % 4 == 0) seg += 1 + rng() % 3;
      rows.push_back(row(seg, 41.0 + i * 1e-3, 2.0 + i * 1e-3, "still"));
    }
    const auto p = build_map_payload(rows);
    std::vector<GeoPoint> flat;
    std::int64_t prev = -1;
    bool distinct = true;
    for (const auto& line : p.polylines) {
      distinct = distinct && line.seg_id != prev;
      prev = line.seg_id;
      flat.insert(flat.end(), line.points.begin(), line.points.end());
    }
    CHECK(distinct);
    REQUIRE(flat.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(flat[i] == GeoPoint{rows[i].lat, rows[i].lon});
  }
}

TEST_CASE("csv export") {
  CHECK(export_csv({}) == "seg_id,activity,lat,lon,date,time\r\n");
  const auto parsed = parse_segment(testing_support::read_fixture("walking_segment.json"));
  std::vector<QueryRow> rows;
  for (const auto& l : parsed.segment.locations) {
    rows.push_back({l.point.lat, l.point.lon, l.time.to_string(), "2015-06-10", "on_foot", 1, 0});
  }
  const auto csv = export_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rows.size()) + 1);
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("plain") == "plain");
  const std::vector<QueryRow> crafted{row(1, 41.0, 2.0, "a,b")};
  CHECK(export_csv(crafted).find("1,\"a,b\",41,2,2015-06-10,10:00:00\r\n") != std::string::npos);
}

TEST_CASE("missing form fields give the form message") {
  for (const auto* name : {"age_min", "age_max", "activity", "from", "to"}) {
    auto form = full_form();
    CAPTURE(name);
    form.erase(name);
    CHECK_THROWS_WITH_AS((void)parse_query_request(params(form)), "All fields must be filled out", QueryError);
    form[name] = "";
    CHECK_THROWS_WITH_AS((void)parse_query_request(params(form)), "All fields must be filled out", QueryError);
  }
  store::Store s(":memory:");
  auto form = full_form();
  form.erase("to");
  const auto reply = handle_query(s, params(form), 2015);
  CHECK(reply.status == 400);
  CHECK(reply.body == R"({"success":0,"message":"All fields must be filled out"})");
}

TEST_CASE("filter values are validated") {
  auto form = full_form();
  const auto req = parse_query_request(params(form));
  CHECK(req.filter.from.to_string() == "2015-06-01 00:00:00");
  CHECK(req.filter.to.to_string() == "2015-06-30 23:59:59");
  CHECK(req.format == Format::map);

  form["age_min"] = "13";
  CHECK_THROWS_AS((void)parse_query_request(params(form)), QueryError);
  form["age_min"] = "x";
  CHECK_THROWS_AS((void)parse_query_request(params(form)), QueryError);
  form = full_form();
  form["age_min"] = "50";
  form["age_max"] = "20";
  CHECK_THROWS_AS((void)parse_query_request(params(form)), QueryError);
  form = full_form();
  form["from"] = "10/06/2015";
  CHECK_THROWS_AS((void)parse_query_request(params(form)), QueryError);
  form = full_form();
  form["format"] = "xml";
  CHECK_THROWS_AS((void)parse_query_request(params(form)), QueryError);
  form["format"] = "csv";
  CHECK(parse_query_request(params(form)).format == Format::csv);
}

TEST_CASE("original form names are accepted") {
  const auto req = parse_query_request(params({{"edad", "20"},
                                               {"edad2", "30"},
                                               {"actividad", "still"},
                                               {"dtp_input1", "2015-06-01 08:00"},
                                               {"dtp_input2", "2015-06-02 09:30"},
                                               {"submit_csv", "CSV"}}));
  CHECK(req.filter.age_min == 20);
  CHECK(req.filter.age_max == 30);
  CHECK(req.filter.activity == "still");
  CHECK(req.filter.to.to_string() == "2015-06-02 09:30:59");
  CHECK(req.format == Format::csv);
}

TEST_CASE("empty results carry the no-marker message") {
  store::Store s(":memory:");
  const auto map = handle_query(s, params(full_form()), 2015);
  CHECK(map.status == 200);
  const auto geo = nlohmann::json::parse(map.body);
  CHECK(geo["features"].empty());
  CHECK(geo["message"] == "No se ha encontrado ningun marcador");

  auto form = full_form();
  form["format"] = "csv";
  const auto csv = handle_query(s, params(form), 2015);
  CHECK(csv.body == "seg_id,activity,lat,lon,date,time\r\n");
  CHECK(std::find(csv.headers.begin(), csv.headers.end(),
                  std::pair<std::string, std::string>{"X-Mobility-Message", std::string(kNoMarkers)}) !=
        csv.headers.end());
}

TEST_CASE("map and csv agree for random filters") {
  store::Store s(":memory:");
  std::mt19937_64 rng(99);
  const std::vector<std::string> acts{"still", "on_foot", "vehicle", "bus"};
  for (int u = 0; u < 4; ++u) {
    store::UserProfile p;
    p.nacimiento = CivilDate{1960 + 10 * u, 1, 1};
    const auto hash = "user" + std::to_string(u);
    s.upsert_user(hash, "r", p);
    for (int k = 0; k < 10; ++k) {
      const CivilDate day{2015, 6, static_cast<int>(1 + rng() % 28)};
      const auto seg = s.insert_segment(hash, {1, 1, 1}, acts[rng() % acts.size()],
                                        {day, TimeOfDay::from_seconds(0)}, {day, TimeOfDay::from_seconds(0)});
      std::vector<store::NewLocation> rows;
      const auto n = 1 + rng() % 5;
      for (std::size_t i = 0; i < n; ++i) {
        rows.push_back({"", 41.3 + (rng() % 10000) * 1e-5, 2.1 + (rng() % 10000) * 1e-5,
                        TimeOfDay::from_seconds(static_cast<int>(rng() % 86400)).to_string(), day.to_string()});
      }
      s.insert_locations(seg.seg_id, rows);
    }
  }
  int nonempty = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto form = full_form();
    const int a = 14 + static_cast<int>(rng() % 86);
    form["age_min"] = std::to_string(a);
    form["age_max"] = std::to_string(std::min(99, a + static_cast<int>(rng() % 40)));
    form["activity"] = trial % 2 ? "All" : acts[rng() % acts.size()];
    const auto map = handle_query(s, params(form), 2015);
    form["format"] = "csv";
    const auto csv = handle_query(s, params(form), 2015);
    const auto from_map = keys_from_geojson(nlohmann::ordered_json::parse(map.body));
    CHECK(from_map == keys_from_csv(csv.body));
    nonempty += !from_map.empty();
  }
  CHECK(nonempty > 5);

  const auto acts_reply = handle_activities(s);
  const auto list = nlohmann::json::parse(acts_reply.body)["activities"];
  CHECK(list[0] == "All");
  CHECK(list.size() == 5);
}
