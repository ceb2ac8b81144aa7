#include "mobility/activity/classifier.hpp"

#include <array>
#include <stdexcept>

namespace mobility::activity {

ActivityClass classify_window(std::span<const ActivitySample> window) {
  if (window.empty()) return ActivityClass::unknown;

  struct Tally {
    int votes = 0;
    long confidence = 0;
  };
  std::array<Tally, kAllActivities.size()> tally{};
  for (const auto& s : window) {
    if (s.confidence < 0 || s.confidence > 100) {
      throw std::invalid_argument("activity confidence outside 0..100");
    }
    auto& t = tally[static_cast<std::size_t>(s.activity)];
    ++t.votes;
    t.confidence += s.confidence;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < tally.size(); ++i) {
    const auto& c = tally[i];
    const auto& b = tally[best];
    if (c.votes > b.votes || (c.votes == b.votes && c.confidence > b.confidence)) best = i;
  }
  return static_cast<ActivityClass>(best);
}

}  // namespace mobility::activity
