#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace mobility {

inline constexpr int kSecondsPerDay = 86'400;

/// Wall-clock time of day with one-second resolution ("HH:MM:SS").
class TimeOfDay {
 public:
  constexpr TimeOfDay() = default;

  /// Throws std::invalid_argument unless 0 <= seconds < 86400.
  static TimeOfDay from_seconds(int seconds);
  static TimeOfDay from_hms(int h, int m, int s);

  /// Parses strict 24h "HH:MM:SS".
  static TimeOfDay parse(std::string_view text);

  [[nodiscard]] constexpr int seconds() const noexcept { return seconds_; }
  [[nodiscard]] std::string to_string() const;

  auto operator<=>(const TimeOfDay&) const = default;

 private:
  explicit constexpr TimeOfDay(int s) : seconds_(s) {}
  int seconds_ = 0;
};

/// Seconds from `first` to `last` assuming the same day; a wrap past
/// midnight (last < first) adds one day.
[[nodiscard]] int elapsed_seconds(TimeOfDay first, TimeOfDay last) noexcept;

}  // namespace mobility
