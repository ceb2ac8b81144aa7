#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "mobility/activity/preferences.hpp"
#include "mobility/server/server.hpp"
#include "mobility/sim/client.hpp"

using namespace mobility;
using namespace mobility::sim;
using testing_support::TempDir;

namespace {

std::string serialize_all(const std::vector<Segment>& segs) { return serialize_segments(segs, true); }

ProcessedTrace run(const std::vector<TraceSample>& trace, const std::filesystem::path& prefs_path,
                   bool silence_on = true) {
  activity::Preferences prefs(prefs_path);
  activity::SilenceMode silence(prefs, activity::kRingerNormal);
  silence.set_enabled(silence_on);
  return process_trace(trace, silence);
}

struct LiveServer {
  TempDir dir;
  std::unique_ptr<server::IngestServer> server;
  explicit LiveServer(int bits = 2048) {
    server::ServerConfig c;
    c.port = 0;
    c.db_path = (dir.path / "m.db").string();
    c.key_dir = dir.path / "keys";
    c.key_bits = bits;
    c.log_level = "off";
    server = std::make_unique<server::IngestServer>(c);
    server->start();
  }
  ClientConfig client(const std::string& prefs = "prefs.xml") const {
    ClientConfig c;
    c.server_url = server->base_url();
    c.prefs_path = dir.path / prefs;
    c.date = CivilDate{2015, 6, 19};
    return c;
  }
};

}  // namespace

TEST_CASE("traces are deterministic per seed") {
  TempDir dir;
  const auto spec = random_spec(42);
  const auto a = generate_trace(spec);
  const auto b = generate_trace(spec);
  REQUIRE(a.size() == b.size());
  CHECK(serialize_all(run(a, dir.path / "a.xml").segments) == serialize_all(run(b, dir.path / "b.xml").segments));
  const auto c = generate_trace(random_spec(43));
  CHECK(serialize_all(run(c, dir.path / "c.xml").segments) != serialize_all(run(a, dir.path / "d.xml").segments));
}

TEST_CASE("sample cadence follows the location profile") {
  TraceSpec spec;
  spec.legs = {{ActivityClass::on_foot, 600, std::nullopt}};
  const auto balanced = generate_trace(spec);
  CHECK(balanced.size() == 30);
  CHECK(balanced[1].reading.at_s - balanced[0].reading.at_s == 20);
  CHECK(balanced[1].location.time.seconds() - balanced[0].location.time.seconds() == 20);
  CHECK(balanced[0].location.time.to_string() == "09:46:44");
  spec.priority = activity::LocationPriority::high_accuracy;
  CHECK(generate_trace(spec).size() == 120);
  spec.priority = activity::LocationPriority::low_power;
  CHECK_THROWS_AS((void)generate_trace(spec), std::invalid_argument);

  TraceSpec bad;
  CHECK_THROWS_AS((void)generate_trace(bad), std::invalid_argument);
  bad.legs = {{ActivityClass::still, 0, std::nullopt}};
  CHECK_THROWS_WITH_AS((void)generate_trace(bad), "zero-length leg", std::invalid_argument);
  bad.legs = {{ActivityClass::still, 90000, std::nullopt}};
  CHECK_THROWS_AS((void)generate_trace(bad), std::invalid_argument);
}

TEST_CASE("a slow walk covers the recorded scale of motion") {
  TraceSpec spec;
  spec.priority = activity::LocationPriority::high_accuracy;
  spec.legs = {{ActivityClass::on_foot, 142, 1.26}};
  const auto trace = generate_trace(spec);
  std::vector<LocationSample> pts;
  for (const auto& s : trace) pts.push_back(s.location);
  const auto m = segment_metrics(pts);
  CHECK(m.duration_s == 140);
  // the generator moves along great circles, so haversine recovers the speed
  CHECK(m.speed_kmh == doctest::Approx(1.26).epsilon(1e-9));
  CHECK(m.distance_m == doctest::Approx(49.69776445992602).epsilon(0.02));
}

TEST_CASE("vehicle legs stay inside their speed band") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    TraceSpec spec;
    spec.seed = seed;
    spec.legs = {{ActivityClass::vehicle, 600, std::nullopt}};
    const auto trace = generate_trace(spec);
    std::vector<double> speeds;
    for (std::size_t i = 1; i < trace.size(); ++i) {
      speeds.push_back(3.6 * haversine_distance(trace[i - 1].location.point, trace[i].location.point) / 20.0);
    }
    std::nth_element(speeds.begin(), speeds.begin() + speeds.size() / 2, speeds.end());
    const double median = speeds[speeds.size() / 2];
    CHECK(median >= 10.0);
    CHECK(median <= 80.0);
  }
}

TEST_CASE("synthetic power readings") {
  const auto trace = generate_trace(random_spec(7, 8));
  for (const auto& s : trace) {
    REQUIRE(s.location.power);
    CHECK(s.location.power->gsm_dbm >= -110);
    CHECK(s.location.power->gsm_dbm <= -60);
    if (is_vehicle_mode(s.truth)) {
      CHECK(s.location.power->wifi_dbm == -200);
    } else {
      CHECK(s.location.power->wifi_dbm >= -90);
      CHECK(s.location.power->wifi_dbm <= -30);
    }
  }
}

TEST_CASE("every generated sample ends up in exactly one segment") {
  TempDir dir;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto trace = generate_trace(random_spec(seed, 1 + seed % 7));
    const auto p = run(trace, dir.path / ("p" + std::to_string(seed) + ".xml"));
    CHECK(sample_count(p.segments) == trace.size());
    std::size_t k = 0;
    for (const auto& seg : p.segments) {
      CHECK(seg.locations.size() >= 2);
      for (const auto& l : seg.locations) CHECK(l == trace[k++].location);
    }
    for (std::size_t i = 1; i < p.segments.size(); ++i) {
      CHECK(p.segments[i].activity != p.segments[i - 1].activity);
    }
  }
}

TEST_CASE("a vehicle leg silences the ringer and restores it after") {
  TempDir dir;
  TraceSpec spec;
  spec.label_noise = 0.0;
  spec.legs = {{ActivityClass::on_foot, 240, std::nullopt},
               {ActivityClass::vehicle, 480, std::nullopt},
               {ActivityClass::on_foot, 240, std::nullopt}};
  const auto p = run(generate_trace(spec), dir.path / "s.xml");
  std::vector<int> modes;
  for (const auto& w : p.windows) modes.push_back(w.ringer_mode);
  CHECK(modes == std::vector<int>{2, 2, 0, 0, 0, 0, 2, 2});
  REQUIRE(p.segments.size() == 3);
  CHECK(p.segments[1].activity == ActivityClass::vehicle);

  const auto off = run(generate_trace(spec), dir.path / "off.xml", false);
  for (const auto& w : off.windows) CHECK(w.ringer_mode == 2);
}

TEST_CASE("metro and bus legs are refined") {
  TempDir dir;
  TraceSpec spec;
  spec.label_noise = 0.0;
  spec.legs = {{ActivityClass::on_foot, 240, std::nullopt},
               {ActivityClass::metro, 480, std::nullopt},
               {ActivityClass::on_foot, 240, std::nullopt},
               {ActivityClass::bus, 480, std::nullopt}};
  const auto p = run(generate_trace(spec), dir.path / "r.xml");
  std::vector<ActivityClass> acts;
  for (const auto& s : p.segments) acts.push_back(s.activity);
  CHECK(acts == std::vector<ActivityClass>{ActivityClass::on_foot, ActivityClass::metro, ActivityClass::on_foot,
                                           ActivityClass::bus});
}

TEST_CASE("identity persists in the preference file") {
  TempDir dir;
  const auto path = dir.path / "prefs.xml";
  const auto a = load_or_create_identity(path);
  const auto b = load_or_create_identity(path);
  CHECK(a.usu_hash == b.usu_hash);
  CHECK(a.regid == b.regid);
  CHECK(a.usu_hash.size() == 32);
  CHECK(std::all_of(a.usu_hash.begin(), a.usu_hash.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); }));
  CHECK(activity::Preferences(path).get_string(kHashKey, "") == a.usu_hash);
  CHECK(load_or_create_identity(dir.path / "other.xml").usu_hash != a.usu_hash);
}

TEST_CASE("upload stores a one-leg trace") {
  LiveServer live;
  TraceSpec spec;
  spec.label_noise = 0.0;
  spec.legs = {{ActivityClass::on_foot, 300, std::nullopt}};
  const auto trace = generate_trace(spec);
  const auto report = run_upload(live.client(), trace);
  CHECK(report.ok());
  CHECK(report.exit_code() == 0);
  REQUIRE(report.segments.size() == 1);
  CHECK(report.segments[0].response->message == "Inserted");
  const auto id = load_or_create_identity(live.dir.path / "prefs.xml");
  const auto segs = live.server->store().segments_of(id.usu_hash);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].seg_subido == "OK");
  CHECK(segs[0].seg_activity == "on_foot");
  CHECK(live.server->store().count_locations() == static_cast<std::int64_t>(trace.size()));
  CHECK(live.server->broker().is_registered(id.regid, "1"));
  CHECK(report.to_json()["samples_uploaded"] == trace.size());
}

TEST_CASE("upload against a dead server reports failure") {
  TempDir dir;
  ClientConfig c;
  c.server_url = "http://127.0.0.1:1";
  c.prefs_path = dir.path / "p.xml";
  c.timeout_s = 2;
  const auto report = run_upload(c, generate_trace(random_spec(1, 2)));
  CHECK_FALSE(report.ok());
  CHECK(report.exit_code() == 1);
  CHECK_FALSE(report.error.empty());
  c.server_url = "ftp://x";
  CHECK_THROWS_AS((void)run_upload(c, generate_trace(random_spec(1, 2))), ClientConfigError);
}

TEST_CASE("load test paces requests") {
  LiveServer live;
  const auto cfg = live.client("load.xml");
  CHECK(load_test(cfg, std::chrono::seconds(1), std::chrono::seconds(0)).empty());
  const auto r = load_test(cfg, std::chrono::milliseconds(50), std::chrono::milliseconds(500), 2048);
  CHECK(r.sent == 10);
  CHECK(r.succeeded == 10);
  CHECK(r.key_bits == 2048);
  CHECK(r.server_decrypts == 20);
  CHECK(r.server_mean_decrypt_s > 0.0);
  CHECK(r.mean_latency_s > 0.0);
  CHECK(r.p95_latency_s <= r.max_latency_s);
  CHECK_THROWS_AS((void)load_test(cfg, std::chrono::seconds(1), std::chrono::seconds(1), 4096), ClientConfigError);
  CHECK_THROWS_AS((void)load_test(cfg, std::chrono::seconds(0), std::chrono::seconds(1)), ClientConfigError);
}

TEST_CASE("inbox polling") {
  LiveServer live;
  const auto cfg = live.client();
  REQUIRE(run_upload(cfg, generate_trace(random_spec(5, 2))).ok());
  live.server->broker().push("Hola", "Nueva version");
  const auto inbox = fetch_inbox(cfg);
  REQUIRE(inbox["messages"].size() == 1);
  CHECK(inbox["messages"][0]["title"] == "Hola");
}

TEST_CASE("client config file") {
  TempDir dir;
  const auto path = dir.path / "c.json";
  {
    std::ofstream out(path);
    out << R"({"server_url":"http://10.0.0.1:9000","silence_feature":false,"date":"2015-06-19",)"
        << R"("profile":{"nombre":"Ana","nacimiento":"1990-01-02","peso":60.5}})";
  }
  const auto c = load_client_config(path);
  CHECK(c.server_url == "http://10.0.0.1:9000");
  CHECK_FALSE(c.silence_feature);
  CHECK(c.date == CivilDate{2015, 6, 19});
  CHECK(c.profile.nombre == "Ana");
  CHECK(c.profile.nacimiento == CivilDate{1990, 1, 2});
  {
    std::ofstream out(path);
    out << R"({"servr_url":"x"})";
  }
  CHECK_THROWS_AS((void)load_client_config(path), ClientConfigError);
  {
    std::ofstream out(path);
    out << R"({"date":"19/06/2015"})";
  }
  CHECK_THROWS_AS((void)load_client_config(path), ClientConfigError);
}
