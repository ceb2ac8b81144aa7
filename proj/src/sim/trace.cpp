#include "mobility/sim/trace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mobility::sim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// point reached after `distance_m` along `bearing_rad` on the model sphere
GeoPoint destination(const GeoPoint& from, double bearing_rad, double distance_m) {
  const double delta = distance_m / kEarthRadiusM;
  const double phi1 = from.lat * kDegToRad;
  const double lambda1 = from.lon * kDegToRad;
  const double phi2 = std::asin(std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(bearing_rad));
  const double lambda2 = lambda1 + std::atan2(std::sin(bearing_rad) * std::sin(delta) * std::cos(phi1),
                                              std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  return {phi2 / kDegToRad, std::remainder(lambda2 / kDegToRad, 360.0)};
}

// what the platform recognizer can tell apart
ActivityClass recognizer_label(ActivityClass truth) {
  switch (truth) {
    case ActivityClass::bus:
    case ActivityClass::tram:
    case ActivityClass::train:
    case ActivityClass::metro:
      return ActivityClass::vehicle;
    default:
      return truth;
  }
}

std::optional<activity::PoiKind> stop_kind(ActivityClass a) {
  switch (a) {
    case ActivityClass::bus:
      return activity::PoiKind::bus;
    case ActivityClass::tram:
      return activity::PoiKind::tram;
    case ActivityClass::train:
      return activity::PoiKind::train;
    default:
      return std::nullopt;
  }
}

}  // namespace

std::pair<double, double> speed_band(ActivityClass a) noexcept {
  switch (a) {
    case ActivityClass::still:
      return {0.0, 0.0};
    case ActivityClass::on_foot:
      return {1.0, 6.0};
    case ActivityClass::bicycle:
      return {8.0, 25.0};
    case ActivityClass::vehicle:
      return {10.0, 80.0};
    case ActivityClass::bus:
    case ActivityClass::tram:
      return {10.0, 50.0};
    case ActivityClass::train:
      return {30.0, 120.0};
    case ActivityClass::metro:
      return {20.0, 60.0};
    case ActivityClass::unknown:
      break;
  }
  return {0.0, 6.0};
}

bool is_vehicle_mode(ActivityClass a) noexcept { return recognizer_label(a) == ActivityClass::vehicle; }

int sample_interval_s(activity::LocationPriority p) {
  const auto profile = activity::location_profile(p);
  if (!profile.interval_s) {
    throw std::invalid_argument(std::string(activity::to_string(p)) + " has no fixed sample interval");
  }
  return *profile.interval_s;
}

std::vector<TraceSample> generate_trace(const TraceSpec& spec) {
  if (spec.legs.empty()) throw std::invalid_argument("trace has no legs");
  std::int64_t total_s = 0;
  for (const auto& leg : spec.legs) {
    if (leg.duration_s <= 0) throw std::invalid_argument("zero-length leg");
    if (leg.speed_kmh && (*leg.speed_kmh < 0.0 || !std::isfinite(*leg.speed_kmh))) {
      throw std::invalid_argument("leg speed must be finite and non-negative");
    }
    total_s += leg.duration_s;
  }
  if (total_s >= kSecondsPerDay) throw std::invalid_argument("trace must be shorter than a day");
  if (!is_valid(spec.start)) throw std::invalid_argument("start point out of range");
  const int interval = sample_interval_s(spec.priority);
  const auto profile = activity::location_profile(spec.priority);
  const double nominal_accuracy = profile.accuracy_m.value_or(100.0);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> gsm(-110, -60);
  std::uniform_int_distribution<int> wifi(-90, -30);
  std::uniform_int_distribution<int> sure(50, 100);
  std::uniform_int_distribution<int> unsure(20, 70);
  std::uniform_int_distribution<std::size_t> any_base(0, kBaseActivities.size() - 1);

  // per-leg cruise speed and heading
  struct LegPlan {
    std::int64_t start_s;
    std::int64_t end_s;
    double speed_kmh;
    bool fixed;
    double heading;
  };
  std::vector<LegPlan> plans;
  std::int64_t at = 0;
  for (const auto& leg : spec.legs) {
    const auto [lo, hi] = speed_band(leg.activity);
    // draw from the middle of the band so jitter stays inside it
    const double cruise = leg.speed_kmh.value_or(lo + (hi - lo) * (0.2 + 0.6 * unit(rng)));
    plans.push_back({at, at + leg.duration_s, cruise, leg.speed_kmh.has_value(), 2.0 * std::numbers::pi * unit(rng)});
    at += leg.duration_s;
  }

  std::vector<TraceSample> out;
  GeoPoint pos = spec.start;
  std::size_t leg_index = 0;
  for (std::int64_t t = 0; t < total_s; t += interval) {
    while (t >= plans[leg_index].end_s) ++leg_index;
    auto& plan = plans[leg_index];
    const auto truth = spec.legs[leg_index].activity;

    if (!out.empty()) {
      // advance over the interval with the mode of the previous sample
      const auto& prev_plan = plans[out.back().leg];
      const auto [lo, hi] = speed_band(spec.legs[out.back().leg].activity);
      double v = prev_plan.speed_kmh;
      if (!prev_plan.fixed && hi > 0.0) v = std::clamp(v * (0.9 + 0.2 * unit(rng)), lo, hi);
      auto& heading = plans[out.back().leg].heading;
      if (!prev_plan.fixed) heading += (unit(rng) - 0.5) * 20.0 * kDegToRad;
      pos = destination(pos, heading, v / 3.6 * interval);
    }

    TraceSample s;
    s.truth = truth;
    s.leg = leg_index;
    s.location.point = pos;
    s.location.time = TimeOfDay::from_seconds(static_cast<int>((spec.start_time.seconds() + t) % kSecondsPerDay));
    s.location.power = SignalPower{gsm(rng), is_vehicle_mode(truth) ? SignalPower::kWifiUnavailable : wifi(rng)};
    if (unit(rng) < spec.label_noise) {
      s.reading = {kBaseActivities[any_base(rng)], unsure(rng), t};
    } else {
      s.reading = {recognizer_label(truth), sure(rng), t};
    }
    // underground rides lose the GPS fix
    s.accuracy_m = truth == ActivityClass::metro ? 150.0 + 350.0 * unit(rng)
                                                 : 5.0 + (nominal_accuracy - 5.0) * unit(rng);
    out.push_back(s);
  }
  return out;
}

TraceSpec random_spec(std::uint64_t seed, std::size_t legs) {
  static constexpr std::array<ActivityClass, 7> kModes = {ActivityClass::still,   ActivityClass::on_foot,
                                                          ActivityClass::bicycle, ActivityClass::vehicle,
                                                          ActivityClass::bus,     ActivityClass::metro,
                                                          ActivityClass::on_foot};
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::uniform_int_distribution<std::size_t> mode(0, kModes.size() - 1);
  std::uniform_int_distribution<int> minutes(4, 15);
  TraceSpec spec;
  spec.seed = seed;
  ActivityClass prev = ActivityClass::unknown;
  while (spec.legs.size() < legs) {
    const auto m = kModes[mode(rng)];
    if (m == prev) continue;
    spec.legs.push_back({m, minutes(rng) * 60, std::nullopt});
    prev = m;
  }
  return spec;
}

TraceWorld TraceWorld::from_trace(const std::vector<TraceSample>& trace) {
  TraceWorld w;
  std::vector<activity::Poi> stops;
  for (const auto& s : trace) {
    if (const auto kind = stop_kind(s.truth)) {
      stops.push_back({s.location.point, *kind});
      w.stop_legs.emplace_back(s.leg, s.location.point);
    }
  }
  w.stops = activity::PoiIndex(std::move(stops));
  return w;
}

bool TraceRouteOracle::has_route(activity::PoiKind, const GeoPoint& from, const GeoPoint& to) const {
  std::optional<std::size_t> from_leg;
  std::optional<std::size_t> to_leg;
  for (const auto& [leg, p] : world_.stop_legs) {
    if (p == from) from_leg = leg;
    if (p == to) to_leg = leg;
  }
  return from_leg && to_leg && *from_leg == *to_leg;
}

}  // namespace mobility::sim
