#include "mobility/core/date.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace mobility {

namespace {

bool digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : kDays[m - 1];
}

[[noreturn]] void bad(std::string_view what, std::string_view text) {
  throw std::invalid_argument("invalid " + std::string(what) + " \"" + std::string(text) + "\"");
}

}  // namespace

bool is_valid(const CivilDate& d) noexcept {
  return d.year >= 1 && d.year <= 9999 && d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

CivilDate CivilDate::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !digits(text.substr(0, 4)) ||
      !digits(text.substr(5, 2)) || !digits(text.substr(8, 2))) {
    bad("date", text);
  }
  CivilDate d{to_int(text.substr(0, 4)), to_int(text.substr(5, 2)), to_int(text.substr(8, 2))};
  if (!is_valid(d)) bad("date", text);
  return d;
}

// Days/civil conversions after H. Hinnant's public-domain algorithms.
long CivilDate::days_since_epoch() const noexcept {
  const int y = year - (month <= 2 ? 1 : 0);
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

CivilDate CivilDate::from_days(long z) noexcept {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {static_cast<int>(y + (m <= 2 ? 1 : 0)), static_cast<int>(m), static_cast<int>(d)};
}

CivilDate CivilDate::today_utc() {
  using namespace std::chrono;
  const auto days = duration_cast<duration<long, std::ratio<86400>>>(system_clock::now().time_since_epoch());
  return from_days(days.count());
}

std::string CivilDate::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

DateTime parse_iso_datetime(std::string_view text, bool end_of_range) {
  if (text.size() < 10) bad("datetime", text);
  DateTime out;
  try {
    out.date = CivilDate::parse(text.substr(0, 10));
  } catch (const std::invalid_argument&) {
    bad("datetime", text);
  }
  if (text.size() == 10) {
    out.time = end_of_range ? TimeOfDay::from_hms(23, 59, 59) : TimeOfDay{};
    return out;
  }
  if (text[10] != 'T' && text[10] != ' ') bad("datetime", text);
  auto rest = text.substr(11);
  if (rest.size() == 5) {
    if (rest[2] != ':' || !digits(rest.substr(0, 2)) || !digits(rest.substr(3, 2))) bad("datetime", text);
    const int h = to_int(rest.substr(0, 2)), m = to_int(rest.substr(3, 2));
    if (h > 23 || m > 59) bad("datetime", text);
    out.time = TimeOfDay::from_hms(h, m, end_of_range ? 59 : 0);
    return out;
  }
  try {
    out.time = TimeOfDay::parse(rest);
  } catch (const std::invalid_argument&) {
    bad("datetime", text);
  }
  return out;
}

}  // namespace mobility
