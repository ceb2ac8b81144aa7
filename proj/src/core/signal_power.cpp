#include "mobility/core/signal_power.hpp"

#include <charconv>
#include <optional>
#include <stdexcept>

namespace mobility {

namespace {

std::optional<int> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Halves {
  std::optional<int> gsm;
  std::optional<int> wifi;
};

Halves split(std::string_view text) {
  const auto v = text.find('V');
  if (v == std::string_view::npos) return {};
  return {parse_int(text.substr(0, v)), parse_int(text.substr(v + 1))};
}

}  // namespace

bool is_valid(const SignalPower& p) noexcept {
  return p.gsm_dbm <= 0 && p.wifi_dbm <= 0 && p.wifi_dbm >= SignalPower::kWifiUnavailable;
}

std::string to_string(const SignalPower& p) {
  return std::to_string(p.gsm_dbm) + "V" + std::to_string(p.wifi_dbm);
}

bool looks_like_power_string(std::string_view text) noexcept {
  auto h = split(text);
  return h.gsm && h.wifi;
}

SignalPower parse_power_string(std::string_view text) {
  auto h = split(text);
  if (!h.gsm || !h.wifi) {
    throw std::invalid_argument("malformed power string \"" + std::string(text) + "\"");
  }
  SignalPower p{*h.gsm, *h.wifi};
  if (!is_valid(p)) {
    throw std::invalid_argument("power out of range \"" + std::string(text) + "\"");
  }
  return p;
}

}  // namespace mobility
