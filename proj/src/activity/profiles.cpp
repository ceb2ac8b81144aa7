#include "mobility/activity/profiles.hpp"

namespace mobility::activity {

LocationProfile location_profile(LocationPriority priority) noexcept {
  switch (priority) {
    case LocationPriority::high_accuracy: return {priority, 5, 7.25, 10.0};
    case LocationPriority::balanced_power_accuracy: return {priority, 20, 0.6, 100.0};
    case LocationPriority::low_power: return {priority, std::nullopt, std::nullopt, 10'000.0};
    case LocationPriority::no_power: return {priority, std::nullopt, std::nullopt, std::nullopt};
  }
  return {priority, std::nullopt, std::nullopt, std::nullopt};
}

std::string_view to_string(LocationPriority p) noexcept {
  switch (p) {
    case LocationPriority::high_accuracy: return "high_accuracy";
    case LocationPriority::balanced_power_accuracy: return "balanced_power_accuracy";
    case LocationPriority::low_power: return "low_power";
    case LocationPriority::no_power: return "no_power";
  }
  return "no_power";
}

std::optional<LocationPriority> priority_from_string(std::string_view name) noexcept {
  for (auto p : kAllPriorities) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

}  // namespace mobility::activity
