#pragma once

#include <cstdint>
#include <span>

#include "mobility/core/activity.hpp"

namespace mobility::activity {

/// Cadence of recognizer polls and the length of one voting window.
inline constexpr int kPollIntervalS = 20;
inline constexpr int kWindowS = 120;

/// One reading from the platform activity recognizer.
struct ActivitySample {
  ActivityClass activity = ActivityClass::unknown;
  int confidence = 0;  // percent, 0..100
  std::int64_t at_s = 0;
};

/// Most repeated activity in a window. Ties go to the larger summed
/// confidence, then to the earlier ActivityClass enumerator.
/// An empty window is unknown.
[[nodiscard]] ActivityClass classify_window(std::span<const ActivitySample> window);

}  // namespace mobility::activity
