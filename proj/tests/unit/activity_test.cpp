#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "mobility/activity/classifier.hpp"
#include "mobility/activity/preferences.hpp"
#include "mobility/activity/profiles.hpp"
#include "mobility/activity/refine.hpp"
#include "mobility/activity/silence.hpp"

using namespace mobility;
using namespace mobility::activity;
using testing_support::TempDir;

namespace {

std::vector<ActivitySample> window_of(std::initializer_list<ActivityClass> classes, int confidence = 50) {
  std::vector<ActivitySample> w;
  std::int64_t t = 0;
  for (auto c : classes) w.push_back({c, confidence, t += kPollIntervalS});
  return w;
}

// Brute-force oracle: count votes per base class, keep the highest count,
// prefer the class listed first in the base order on ties.
ActivityClass mode_by_counting(const std::vector<ActivityClass>& classes) {
  if (classes.empty()) return ActivityClass::unknown;
  ActivityClass best = ActivityClass::unknown;
  long best_count = -1;
  for (auto candidate : kBaseActivities) {
    const long n = std::count(classes.begin(), classes.end(), candidate);
    if (n > best_count) {
      best_count = n;
      best = candidate;
    }
  }
  return best;
}

LocationSample at(double lat, double lon, int t) { return {{lat, lon}, TimeOfDay::from_seconds(t), {}}; }

class ThrowingOracle final : public RouteOracle {
 public:
  bool has_route(PoiKind, const GeoPoint&, const GeoPoint&) const override { throw RouteOracleError("offline"); }
};


}  // namespace

TEST_SUITE("classify_window") {
  TEST_CASE("strict majority") {
    using enum ActivityClass;
    CHECK(classify_window(window_of({vehicle, still, vehicle, vehicle, still, vehicle})) == vehicle);
  }

  TEST_CASE("empty window is unknown") { CHECK(classify_window({}) == ActivityClass::unknown); }

  TEST_CASE("tie broken by summed confidence before enum order") {
    std::vector<ActivitySample> w = {{ActivityClass::still, 40, 0},
                                     {ActivityClass::vehicle, 90, 20},
                                     {ActivityClass::still, 40, 40},
                                     {ActivityClass::vehicle, 90, 60}};
    CHECK(classify_window(w) == ActivityClass::vehicle);
    w[1].confidence = w[3].confidence = 40;
    CHECK(classify_window(w) == ActivityClass::still);
  }

  TEST_CASE("confidence outside 0..100 is rejected") {
    std::vector<ActivitySample> w = {{ActivityClass::still, 101, 0}};
    CHECK_THROWS_AS((void)classify_window(w), std::invalid_argument);
  }

  TEST_CASE("exhaustive agreement with mode counting for every window of 1..6 polls") {
    long checked = 0;
    for (int len = 1; len <= 6; ++len) {
      int total = 1;
      for (int i = 0; i < len; ++i) total *= 5;
      for (int code = 0; code < total; ++code) {
        std::vector<ActivityClass> classes;
        int c = code;
        for (int i = 0; i < len; ++i, c /= 5) classes.push_back(kBaseActivities[c % 5]);
        std::vector<ActivitySample> w;
        for (std::size_t i = 0; i < classes.size(); ++i) w.push_back({classes[i], 70, std::int64_t(i) * 20});
        const auto got = classify_window(w);
        REQUIRE(got == mode_by_counting(classes));
        REQUIRE(std::find(classes.begin(), classes.end(), got) != classes.end());
        ++checked;
      }
    }
    CHECK(checked == 5 + 25 + 125 + 625 + 3125 + 15625);
  }
}

TEST_SUITE("refine_activity") {
  const PoiIndex stops({{{41.3850, 2.1700}, PoiKind::bus},
                        {{41.3900, 2.1800}, PoiKind::bus},
                        {{41.3850, 2.1701}, PoiKind::tram},
                        {{41.4000, 2.1900}, PoiKind::tram}});
  const TableRouteOracle routes({{PoiKind::bus, {41.3850, 2.1700}, {41.3900, 2.1800}, true}});

  TEST_CASE("sustained poor accuracy while motorized means metro") {
    std::vector<LocationSample> w = {at(41.38, 2.17, 0), at(41.381, 2.171, 20), at(41.382, 2.172, 40)};
    std::vector<double> acc = {150, 150, 150};
    CHECK(refine_activity(ActivityClass::vehicle, w, acc, stops, &routes) == ActivityClass::metro);
    acc = {20, 160, 30};
    CHECK(refine_activity(ActivityClass::vehicle, w, acc, stops, &routes) == ActivityClass::vehicle);
    acc = {100, 100, 100};
    CHECK(refine_activity(ActivityClass::vehicle, w, acc, stops, &routes) == ActivityClass::vehicle);
  }

  TEST_CASE("still may be upgraded to metro") {
    std::vector<LocationSample> w = {at(41.38, 2.17, 0), at(41.38, 2.17, 20)};
    std::vector<double> acc = {300, 250};
    CHECK(refine_activity(ActivityClass::still, w, acc, stops, nullptr) == ActivityClass::metro);
  }

  TEST_CASE("endpoints at two bus stops with a confirmed route means bus") {
    std::vector<LocationSample> w = {at(41.38502, 2.17002, 0), at(41.387, 2.175, 60), at(41.38998, 2.17998, 120)};
    std::vector<double> acc = {10, 12, 9};
    CHECK(refine_activity(ActivityClass::vehicle, w, acc, stops, &routes) == ActivityClass::bus);
  }

  TEST_CASE("no confirmed route keeps the base class") {
    std::vector<LocationSample> w = {at(41.38502, 2.17012, 0), at(41.39998, 2.18998, 120)};
    std::vector<double> acc = {10, 9};
    CHECK(refine_activity(ActivityClass::vehicle, w, acc, stops, &routes) == ActivityClass::vehicle);
  }

  TEST_CASE("endpoint outside the stop radius keeps the base class") {
    std::vector<LocationSample> w = {at(41.3860, 2.1700, 0), at(41.38998, 2.17998, 120)};
    std::vector<double> acc = {10, 9};
    CHECK(refine_activity(ActivityClass::vehicle, w, acc, stops, &routes) == ActivityClass::vehicle);
  }

  TEST_CASE("oracle failure skips the stop heuristic") {
    ThrowingOracle broken;
    std::vector<LocationSample> w = {at(41.38502, 2.17002, 0), at(41.38998, 2.17998, 120)};
    std::vector<double> acc = {10, 9};
    CHECK(refine_activity(ActivityClass::vehicle, w, acc, stops, &broken) == ActivityClass::vehicle);
  }

  TEST_CASE("non-motorized bases are never refined") {
    std::vector<LocationSample> w = {at(41.38502, 2.17002, 0), at(41.38998, 2.17998, 120)};
    std::vector<double> acc = {500, 500};
    CHECK(refine_activity(ActivityClass::on_foot, w, acc, stops, &routes) == ActivityClass::on_foot);
    CHECK(refine_activity(ActivityClass::bicycle, w, acc, stops, &routes) == ActivityClass::bicycle);
  }

  TEST_CASE("misaligned accuracy list") {
    std::vector<LocationSample> w = {at(41.38, 2.17, 0)};
    std::vector<double> acc = {1, 2};
    CHECK_THROWS_AS((void)refine_activity(ActivityClass::vehicle, w, acc, stops, nullptr), std::invalid_argument);
  }

  TEST_CASE("csv loaders") {
    std::istringstream poi_csv("kind,lat,lon\nbus,41.385,2.17\n# comment\n\ntram,41.4,2.19\n");
    const auto idx = PoiIndex::from_csv(poi_csv);
    REQUIRE(idx.stops().size() == 2);
    CHECK(idx.stops()[1].kind == PoiKind::tram);

    std::istringstream bad("ferry,41.0,2.0\n");
    CHECK_THROWS_WITH_AS((void)PoiIndex::from_csv(bad), doctest::Contains("ferry"), std::runtime_error);

    std::istringstream routes_csv("bus,41.385,2.17,41.39,2.18,1\ntram,41.385,2.17,41.4,2.19,0\n");
    const auto oracle = TableRouteOracle::from_csv(routes_csv);
    CHECK(oracle.has_route(PoiKind::bus, {41.39, 2.18}, {41.385, 2.17}));
    CHECK_FALSE(oracle.has_route(PoiKind::tram, {41.385, 2.17}, {41.4, 2.19}));
    CHECK_FALSE(oracle.has_route(PoiKind::train, {41.385, 2.17}, {41.4, 2.19}));
  }
}

TEST_SUITE("silence_transition") {
  TEST_CASE("recorded algorithm steps") {
    CHECK(silence_transition({2, 5}, ActivityClass::vehicle, true) == SilenceState{0, 2});
    CHECK(silence_transition({0, 2}, ActivityClass::on_foot, true) == SilenceState{2, 5});
    CHECK(silence_transition({1, 5}, ActivityClass::still, true) == SilenceState{1, 5});
  }

  TEST_CASE("all 48 cases against the hand table") {
    struct Row {
      int mode, stored;
      bool on, vehicle;
      int new_mode, new_stored;
    };
    // clang-format off
    const Row table[] = {
        {0,0,false,false, 0,0}, {0,0,false,true, 0,0}, {0,0,true,false, 0,5}, {0,0,true,true, 0,0},
        {0,1,false,false, 0,1}, {0,1,false,true, 0,1}, {0,1,true,false, 1,5}, {0,1,true,true, 0,1},
        {0,2,false,false, 0,2}, {0,2,false,true, 0,2}, {0,2,true,false, 2,5}, {0,2,true,true, 0,2},
        {0,5,false,false, 0,5}, {0,5,false,true, 0,5}, {0,5,true,false, 0,5}, {0,5,true,true, 0,0},
        {1,0,false,false, 1,0}, {1,0,false,true, 1,0}, {1,0,true,false, 0,5}, {1,0,true,true, 0,0},
        {1,1,false,false, 1,1}, {1,1,false,true, 1,1}, {1,1,true,false, 1,5}, {1,1,true,true, 0,1},
        {1,2,false,false, 1,2}, {1,2,false,true, 1,2}, {1,2,true,false, 2,5}, {1,2,true,true, 0,2},
        {1,5,false,false, 1,5}, {1,5,false,true, 1,5}, {1,5,true,false, 1,5}, {1,5,true,true, 0,1},
        {2,0,false,false, 2,0}, {2,0,false,true, 2,0}, {2,0,true,false, 0,5}, {2,0,true,true, 0,0},
        {2,1,false,false, 2,1}, {2,1,false,true, 2,1}, {2,1,true,false, 1,5}, {2,1,true,true, 0,1},
        {2,2,false,false, 2,2}, {2,2,false,true, 2,2}, {2,2,true,false, 2,5}, {2,2,true,true, 0,2},
        {2,5,false,false, 2,5}, {2,5,false,true, 2,5}, {2,5,true,false, 2,5}, {2,5,true,true, 0,2},
    };
    // clang-format on
    static_assert(std::size(table) == 48);
    for (const auto& r : table) {
      CAPTURE(r.mode);
      CAPTURE(r.stored);
      CAPTURE(r.on);
      CAPTURE(r.vehicle);
      const auto detected = r.vehicle ? ActivityClass::vehicle : ActivityClass::on_foot;
      CHECK(silence_transition({r.mode, r.stored}, detected, r.on) == SilenceState{r.new_mode, r.new_stored});
    }
  }

  TEST_CASE("repeated identical detections are idempotent") {
    for (int m : {0, 1, 2}) {
      for (int s : {0, 1, 2, 5}) {
        for (bool on : {false, true}) {
          for (auto a : kAllActivities) {
            const auto once = silence_transition({m, s}, a, on);
            CHECK(silence_transition(once, a, on) == once);
          }
        }
      }
    }
  }

  TEST_CASE("with the feature on, any non-vehicle detection clears the saved slot") {
    for (int m : {0, 1, 2}) {
      for (int s : {0, 1, 2, 5}) {
        for (auto a : kAllActivities) {
          if (a == ActivityClass::vehicle) continue;
          CHECK(silence_transition({m, s}, a, true).stored_previous == kNothingStored);
        }
      }
    }
  }

  TEST_CASE("invalid codes") {
    CHECK_THROWS_AS((void)silence_transition({3, 5}, ActivityClass::vehicle, true), std::invalid_argument);
    CHECK_THROWS_AS((void)silence_transition({0, 4}, ActivityClass::vehicle, true), std::invalid_argument);
  }

  TEST_CASE("silence mode persists the saved slot in the preference file") {
    TempDir dir;
    const auto file = dir.path / "shared_prefs" / "mobilitapp.xml";
    {
      Preferences prefs(file);
      SilenceMode sm(prefs, kRingerVibrate);
      sm.set_enabled(true);
      CHECK(sm.on_activity(ActivityClass::vehicle) == kRingerSilent);
      CHECK(sm.stored_previous() == kRingerVibrate);
    }
    {
      Preferences prefs(file);
      CHECK(prefs.get_int(SilenceMode::kStoredKey, 5) == kRingerVibrate);
      SilenceMode sm(prefs, kRingerSilent);
      CHECK(sm.on_activity(ActivityClass::on_foot) == kRingerVibrate);
      CHECK(sm.stored_previous() == kNothingStored);
    }
    Preferences prefs(file);
    CHECK(prefs.get_int(SilenceMode::kStoredKey, 0) == kNothingStored);
    CHECK(prefs.get_string(SilenceMode::kFeatureKey, "") == "ON");
  }
}

TEST_SUITE("location profiles") {
  TEST_CASE("golden table") {
    auto p = location_profile(LocationPriority::high_accuracy);
    CHECK(p.interval_s == 5);
    CHECK(p.battery_drain_pct_per_h == 7.25);
    CHECK(p.accuracy_m == 10.0);

    p = location_profile(LocationPriority::balanced_power_accuracy);
    CHECK(p.interval_s == 20);
    CHECK(p.battery_drain_pct_per_h == 0.6);
    CHECK(p.accuracy_m == 100.0);

    p = location_profile(LocationPriority::low_power);
    CHECK_FALSE(p.interval_s);
    CHECK_FALSE(p.battery_drain_pct_per_h);
    CHECK(p.accuracy_m == 10'000.0);

    p = location_profile(LocationPriority::no_power);
    CHECK_FALSE(p.interval_s);
    CHECK_FALSE(p.battery_drain_pct_per_h);
    CHECK_FALSE(p.accuracy_m);
  }

  TEST_CASE("names round trip") {
    for (auto p : kAllPriorities) CHECK(priority_from_string(to_string(p)) == p);
    CHECK_FALSE(priority_from_string("max"));
  }
}

TEST_SUITE("preferences") {
  TEST_CASE("reads the client's login preference file") {
    const std::string xml = R"(<?xml version='1.0' encoding='utf-8'
standalone='yes' ?>
<map>
<string name="nombre">Angel</string>
<null name="birthday" />
<int name="genero" value="0" />
<string name="apellidos">Torres</string>
<string
name="correo">angel.torres.moreira@gmail.com</string>
</map>)";
    const auto values = Preferences::parse_xml(xml);
    REQUIRE(values.size() == 5);
    CHECK(std::get<std::string>(values.at("nombre")) == "Angel");
    CHECK(std::holds_alternative<std::monostate>(values.at("birthday")));
    CHECK(std::get<std::int64_t>(values.at("genero")) == 0);
    CHECK(std::get<std::string>(values.at("correo")) == "angel.torres.moreira@gmail.com");
  }

  TEST_CASE("write then read preserves every value") {
    TempDir dir;
    const auto file = dir.path / "p.xml";
    Preferences prefs(file);
    prefs.put_string("hash", "a<b>&\"c'");
    prefs.put_int("estadoAnterior", 5);
    prefs.put_int("big", 1LL << 40);
    prefs.put_bool("flag", true);
    prefs.put_null("nothing");
    prefs.put_string("empty", "");
    prefs.commit();

    Preferences again(file);
    CHECK(again.get_string("hash", "") == "a<b>&\"c'");
    CHECK(again.get_int("estadoAnterior", 0) == 5);
    CHECK(again.get_int("big", 0) == (1LL << 40));
    CHECK(again.get_bool("flag", false));
    CHECK(again.contains("nothing"));
    CHECK(again.get_string("empty", "x").empty());
    CHECK(again.get_int("missing", 9) == 9);
    CHECK(again.to_xml() == prefs.to_xml());
  }

  TEST_CASE("malformed documents") {
    CHECK_THROWS_AS((void)Preferences::parse_xml("<map><int name=\"x\" value=\"y\" /></map>"), std::runtime_error);
    CHECK_THROWS_AS((void)Preferences::parse_xml("<map><string name=\"x\">open"), std::runtime_error);
    CHECK_THROWS_AS((void)Preferences::parse_xml("<map><float name=\"x\" value=\"1\" /></map>"), std::runtime_error);
    CHECK(Preferences::parse_xml("").empty());
    CHECK(Preferences::parse_xml("<map />").empty());
  }
}
