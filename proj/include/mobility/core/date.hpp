#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "mobility/core/time_of_day.hpp"

namespace mobility {

/// Proleptic Gregorian calendar date.
struct CivilDate {
  int year = 1970;
  int month = 1;
  int day = 1;

  /// Strict "YYYY-MM-DD"; throws std::invalid_argument.
  static CivilDate parse(std::string_view text);
  static CivilDate from_days(long days_since_epoch) noexcept;
  static CivilDate today_utc();

  [[nodiscard]] long days_since_epoch() const noexcept;
  [[nodiscard]] CivilDate next_day() const noexcept { return from_days(days_since_epoch() + 1); }
  [[nodiscard]] std::string to_string() const;

  auto operator<=>(const CivilDate&) const = default;
};

[[nodiscard]] bool is_valid(const CivilDate& d) noexcept;

struct DateTime {
  CivilDate date;
  TimeOfDay time;

  /// "YYYY-MM-DD HH:MM:SS", which orders lexicographically like time does.
  [[nodiscard]] std::string to_string() const { return date.to_string() + " " + time.to_string(); }

  auto operator<=>(const DateTime&) const = default;
};

/// ISO 8601 "YYYY-MM-DD", "YYYY-MM-DDTHH:MM" or "YYYY-MM-DDTHH:MM:SS"
/// (a space may replace the 'T'). A missing time becomes 00:00:00, or
/// 23:59:59 when `end_of_range` is set; missing seconds become :00 or :59
/// likewise. Throws std::invalid_argument.
[[nodiscard]] DateTime parse_iso_datetime(std::string_view text, bool end_of_range = false);

}  // namespace mobility
