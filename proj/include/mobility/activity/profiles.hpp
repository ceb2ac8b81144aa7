#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace mobility::activity {

enum class LocationPriority { high_accuracy, balanced_power_accuracy, low_power, no_power };

inline constexpr std::array<LocationPriority, 4> kAllPriorities = {
    LocationPriority::high_accuracy, LocationPriority::balanced_power_accuracy,
    LocationPriority::low_power, LocationPriority::no_power};

/// Location request trade-off between accuracy and battery.
/// Empty optionals stand for the unquantified entries: no fixed interval,
/// a "small" battery drain and a "variable" accuracy.
struct LocationProfile {
  LocationPriority priority;
  std::optional<int> interval_s;
  std::optional<double> battery_drain_pct_per_h;
  std::optional<double> accuracy_m;
};

[[nodiscard]] LocationProfile location_profile(LocationPriority priority) noexcept;

[[nodiscard]] std::string_view to_string(LocationPriority p) noexcept;
[[nodiscard]] std::optional<LocationPriority> priority_from_string(std::string_view name) noexcept;

}  // namespace mobility::activity
