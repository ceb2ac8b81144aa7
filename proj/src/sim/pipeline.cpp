#include "mobility/sim/pipeline.hpp"

#include <stdexcept>

namespace mobility::sim {

ProcessedTrace process_trace(const std::vector<TraceSample>& trace, activity::SilenceMode& silence,
                             const activity::PoiIndex& stops, const activity::RouteOracle* oracle) {
  if (trace.size() < 2) throw std::invalid_argument("a trace needs at least two samples");
  ProcessedTrace out;
  std::vector<ActivityClass> label(trace.size());

  std::size_t i = 0;
  while (i < trace.size()) {
    const auto window_index = trace[i].reading.at_s / activity::kWindowS;
    std::size_t j = i;
    std::vector<activity::ActivitySample> readings;
    std::vector<LocationSample> points;
    std::vector<double> accuracy;
    while (j < trace.size() && trace[j].reading.at_s / activity::kWindowS == window_index) {
      readings.push_back(trace[j].reading);
      points.push_back(trace[j].location);
      accuracy.push_back(trace[j].accuracy_m);
      ++j;
    }
    WindowDecision d;
    d.start_s = window_index * activity::kWindowS;
    d.first_sample = i;
    d.sample_count = j - i;
    d.base = activity::classify_window(readings);
    d.refined = activity::refine_activity(d.base, points, accuracy, stops, oracle);
    d.ringer_mode = silence.on_activity(d.base);
    out.windows.push_back(d);
    for (std::size_t k = i; k < j; ++k) label[k] = d.refined;
    i = j;
  }

  // runs of equal labels
  struct Run {
    ActivityClass activity;
    std::vector<LocationSample> samples;
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (runs.empty() || runs.back().activity != label[k]) runs.push_back({label[k], {}});
    runs.back().samples.push_back(trace[k].location);
  }
  std::vector<Run> merged;
  for (auto& r : runs) {
    if (r.samples.size() == 1 && !merged.empty()) {
      merged.back().samples.push_back(r.samples.front());
    } else {
      merged.push_back(std::move(r));
    }
  }
  if (merged.size() > 1 && merged.front().samples.size() == 1) {
    merged[1].samples.insert(merged[1].samples.begin(), merged.front().samples.front());
    merged.erase(merged.begin());
  }
  for (auto& r : merged) out.segments.push_back(make_segment(r.activity, std::move(r.samples)));
  return out;
}

ProcessedTrace process_trace(const std::vector<TraceSample>& trace, activity::SilenceMode& silence) {
  const auto world = TraceWorld::from_trace(trace);
  const TraceRouteOracle oracle(world);
  return process_trace(trace, silence, world.stops, &oracle);
}

std::size_t sample_count(const std::vector<Segment>& segments) noexcept {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.locations.size();
  return n;
}

}  // namespace mobility::sim
