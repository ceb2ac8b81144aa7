#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace mobility {

// Declaration order is also the tie-break order used by the classifier.
enum class ActivityClass {
  still,
  on_foot,
  bicycle,
  vehicle,
  bus,
  tram,
  train,
  metro,
  unknown,
};

inline constexpr std::array<ActivityClass, 9> kAllActivities = {
    ActivityClass::still, ActivityClass::on_foot, ActivityClass::bicycle,
    ActivityClass::vehicle, ActivityClass::bus, ActivityClass::tram,
    ActivityClass::train, ActivityClass::metro, ActivityClass::unknown,
};

/// The five classes reported by the platform activity recognizer.
inline constexpr std::array<ActivityClass, 5> kBaseActivities = {
    ActivityClass::still, ActivityClass::on_foot, ActivityClass::bicycle,
    ActivityClass::vehicle, ActivityClass::unknown,
};

[[nodiscard]] std::string_view to_string(ActivityClass a) noexcept;
[[nodiscard]] std::optional<ActivityClass> activity_from_string(std::string_view name) noexcept;
[[nodiscard]] bool is_base_activity(ActivityClass a) noexcept;

}  // namespace mobility
