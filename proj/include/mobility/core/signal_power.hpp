#pragma once

#include <string>
#include <string_view>

namespace mobility {

/// Radio power readings captured with a location fix, in dBm.
/// A Wi-Fi reading of -200 means no Wi-Fi network was visible.
struct SignalPower {
  static constexpr int kWifiUnavailable = -200;

  int gsm_dbm = 0;
  int wifi_dbm = kWifiUnavailable;

  [[nodiscard]] bool wifi_available() const noexcept { return wifi_dbm != kWifiUnavailable; }

  friend bool operator==(const SignalPower&, const SignalPower&) = default;
};

[[nodiscard]] bool is_valid(const SignalPower& p) noexcept;

/// "<gsm>V<wifi>", e.g. "-105V-55".
[[nodiscard]] std::string to_string(const SignalPower& p);

/// Inverse of to_string; throws std::invalid_argument on malformed text
/// or out-of-range values.
[[nodiscard]] SignalPower parse_power_string(std::string_view text);

/// True when `text` has the "<int>V<int>" shape (range not checked).
[[nodiscard]] bool looks_like_power_string(std::string_view text) noexcept;

}  // namespace mobility
