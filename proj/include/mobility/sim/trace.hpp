#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mobility/activity/classifier.hpp"
#include "mobility/activity/profiles.hpp"
#include "mobility/activity/refine.hpp"
#include "mobility/core/segment.hpp"

namespace mobility::sim {

/// A stretch of travel in one mode. Without a fixed speed, one is drawn
/// from the mode's typical band.
struct Leg {
  ActivityClass activity = ActivityClass::still;
  int duration_s = 0;
  std::optional<double> speed_kmh;
};

struct TraceSpec {
  std::uint64_t seed = 1;
  std::vector<Leg> legs;
  GeoPoint start{41.400971, 2.165102};
  TimeOfDay start_time = TimeOfDay::from_hms(9, 46, 44);
  activity::LocationPriority priority = activity::LocationPriority::balanced_power_accuracy;
  /// Chance that the recognizer reports a wrong base class.
  double label_noise = 0.1;
};

struct TraceSample {
  LocationSample location;  // always carries a synthetic power reading
  activity::ActivitySample reading;
  double accuracy_m = 0.0;
  ActivityClass truth = ActivityClass::unknown;
  std::size_t leg = 0;
};

/// Typical speed range of a mode in km/h.
[[nodiscard]] std::pair<double, double> speed_band(ActivityClass a) noexcept;

/// Motorised modes, where Wi-Fi is reported unavailable.
[[nodiscard]] bool is_vehicle_mode(ActivityClass a) noexcept;

/// Sample interval of a profile; throws std::invalid_argument for profiles
/// without a fixed interval.
[[nodiscard]] int sample_interval_s(activity::LocationPriority p);

/// One sample per profile interval from the trace start, deterministic for
/// a seed. Throws std::invalid_argument for empty or zero-length legs and
/// for traces of a day or longer.
[[nodiscard]] std::vector<TraceSample> generate_trace(const TraceSpec& spec);

/// A seeded mix of legs for demo and load runs.
[[nodiscard]] TraceSpec random_spec(std::uint64_t seed, std::size_t legs = 6);

/// Stops along the sampled path of bus, tram and train legs, with a route
/// oracle that links stops of the same leg. Lets refinement recognise the
/// legs the generator laid out.
struct TraceWorld {
  activity::PoiIndex stops;
  std::vector<std::pair<std::size_t, GeoPoint>> stop_legs;

  [[nodiscard]] static TraceWorld from_trace(const std::vector<TraceSample>& trace);
};

class TraceRouteOracle final : public activity::RouteOracle {
 public:
  explicit TraceRouteOracle(const TraceWorld& world) : world_(world) {}
  bool has_route(activity::PoiKind kind, const GeoPoint& from, const GeoPoint& to) const override;

 private:
  const TraceWorld& world_;
};

}  // namespace mobility::sim
