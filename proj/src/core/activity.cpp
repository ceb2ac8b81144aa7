#include "mobility/core/activity.hpp"

#include <algorithm>

namespace mobility {

std::string_view to_string(ActivityClass a) noexcept {
  switch (a) {
    case ActivityClass::still: return "still";
    case ActivityClass::on_foot: return "on_foot";
    case ActivityClass::bicycle: return "bicycle";
    case ActivityClass::vehicle: return "vehicle";
    case ActivityClass::bus: return "bus";
    case ActivityClass::tram: return "tram";
    case ActivityClass::train: return "train";
    case ActivityClass::metro: return "metro";
    case ActivityClass::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<ActivityClass> activity_from_string(std::string_view name) noexcept {
  for (auto a : kAllActivities) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

bool is_base_activity(ActivityClass a) noexcept {
  return std::find(kBaseActivities.begin(), kBaseActivities.end(), a) != kBaseActivities.end();
}

}  // namespace mobility
