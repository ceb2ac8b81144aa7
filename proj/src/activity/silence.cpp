#include "mobility/activity/silence.hpp"

#include <stdexcept>

namespace mobility::activity {

namespace {
bool valid_mode(int m) { return m == kRingerSilent || m == kRingerVibrate || m == kRingerNormal; }
}  // namespace

bool is_valid(const SilenceState& s) noexcept {
  return valid_mode(s.mode) && (valid_mode(s.stored_previous) || s.stored_previous == kNothingStored);
}

SilenceState silence_transition(SilenceState current, ActivityClass detected, bool feature_on) {
  if (!is_valid(current)) throw std::invalid_argument("invalid ringer state");
  if (!feature_on) return current;

  if (detected == ActivityClass::vehicle) {
    if (current.stored_previous == kNothingStored) current.stored_previous = current.mode;
    current.mode = kRingerSilent;
    return current;
  }
  if (current.stored_previous != kNothingStored) current.mode = current.stored_previous;
  current.stored_previous = kNothingStored;
  return current;
}

SilenceMode::SilenceMode(Preferences& prefs, int ringer_mode) : prefs_(prefs), mode_(ringer_mode) {
  if (!valid_mode(ringer_mode)) throw std::invalid_argument("invalid ringer mode");
}

void SilenceMode::set_enabled(bool on) {
  prefs_.put_string(kFeatureKey, on ? "ON" : "OFF");
  prefs_.commit();
}

bool SilenceMode::enabled() const {
  const auto v = prefs_.get_string(kFeatureKey, "OFF");
  return v == "ON" || v == "on" || v == "On";
}

int SilenceMode::stored_previous() const { return static_cast<int>(prefs_.get_int(kStoredKey, kNothingStored)); }

void SilenceMode::set_ringer_mode(int mode) {
  if (!valid_mode(mode)) throw std::invalid_argument("invalid ringer mode");
  mode_ = mode;
}

int SilenceMode::on_activity(ActivityClass detected) {
  const SilenceState before{mode_, stored_previous()};
  const auto after = silence_transition(before, detected, enabled());
  mode_ = after.mode;
  if (after.stored_previous != before.stored_previous || !prefs_.contains(kStoredKey)) {
    prefs_.put_int(kStoredKey, after.stored_previous);
    prefs_.commit();
  }
  return mode_;
}

}  // namespace mobility::activity
