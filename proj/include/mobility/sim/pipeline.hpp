#pragma once

#include <cstdint>
#include <vector>

#include "mobility/activity/refine.hpp"
#include "mobility/activity/silence.hpp"
#include "mobility/sim/trace.hpp"

namespace mobility::sim {

/// What the client decided for one recognizer window.
struct WindowDecision {
  std::int64_t start_s = 0;
  std::size_t first_sample = 0;
  std::size_t sample_count = 0;
  ActivityClass base = ActivityClass::unknown;
  ActivityClass refined = ActivityClass::unknown;
  int ringer_mode = activity::kRingerNormal;
};

struct ProcessedTrace {
  std::vector<WindowDecision> windows;
  std::vector<Segment> segments;
};

/// Runs a trace through the client logic: each kWindowS window is voted,
/// refined and fed to silence mode (with its base class), then consecutive
/// samples with the same refined class form segments. A lone sample between
/// runs joins the previous segment (the next one at the start) so every
/// sample is uploaded. Throws std::invalid_argument for fewer than two samples.
[[nodiscard]] ProcessedTrace process_trace(const std::vector<TraceSample>& trace, activity::SilenceMode& silence,
                                           const activity::PoiIndex& stops, const activity::RouteOracle* oracle);

/// process_trace with the stops and routes implied by the trace itself.
[[nodiscard]] ProcessedTrace process_trace(const std::vector<TraceSample>& trace, activity::SilenceMode& silence);

[[nodiscard]] std::size_t sample_count(const std::vector<Segment>& segments) noexcept;

}  // namespace mobility::sim
