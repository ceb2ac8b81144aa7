#include "mobility/core/time_of_day.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace mobility {

namespace {

bool parse_two_digits(std::string_view s, int& out) {
  if (s.size() != 2 || s[0] < '0' || s[0] > '9' || s[1] < '0' || s[1] > '9') return false;
  out = (s[0] - '0') * 10 + (s[1] - '0');
  return true;
}

}  // namespace

TimeOfDay TimeOfDay::from_seconds(int seconds) {
  if (seconds < 0 || seconds >= kSecondsPerDay) {
    throw std::invalid_argument("time of day out of range: " + std::to_string(seconds));
  }
  return TimeOfDay(seconds);
}

TimeOfDay TimeOfDay::from_hms(int h, int m, int s) {
  if (h < 0 || h > 23 || m < 0 || m > 59 || s < 0 || s > 59) {
    throw std::invalid_argument("invalid time of day");
  }
  return TimeOfDay(h * 3600 + m * 60 + s);
}

TimeOfDay TimeOfDay::parse(std::string_view text) {
  int h = 0, m = 0, s = 0;
  if (text.size() != 8 || text[2] != ':' || text[5] != ':' || !parse_two_digits(text.substr(0, 2), h) ||
      !parse_two_digits(text.substr(3, 2), m) || !parse_two_digits(text.substr(6, 2), s) || h > 23 ||
      m > 59 || s > 59) {
    throw std::invalid_argument("invalid time \"" + std::string(text) + "\", expected HH:MM:SS");
  }
  return TimeOfDay(h * 3600 + m * 60 + s);
}

std::string TimeOfDay::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", seconds_ / 3600, (seconds_ / 60) % 60, seconds_ % 60);
  return buf;
}

int elapsed_seconds(TimeOfDay first, TimeOfDay last) noexcept {
  int d = last.seconds() - first.seconds();
  return d < 0 ? d + kSecondsPerDay : d;
}

}  // namespace mobility
