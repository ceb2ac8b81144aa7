#pragma once

#include "mobility/activity/preferences.hpp"
#include "mobility/core/activity.hpp"

namespace mobility::activity {

/// Ringer codes as used by the platform audio manager.
inline constexpr int kRingerSilent = 0;
inline constexpr int kRingerVibrate = 1;
inline constexpr int kRingerNormal = 2;
/// Marker for "no ringer mode saved".
inline constexpr int kNothingStored = 5;

struct SilenceState {
  int mode = kRingerNormal;
  int stored_previous = kNothingStored;

  friend bool operator==(const SilenceState&, const SilenceState&) = default;
};

[[nodiscard]] bool is_valid(const SilenceState& s) noexcept;

/// Ringer automation: a vehicle detection saves the current mode (unless
/// one is already saved) and silences the phone; any other detection
/// restores the saved mode and clears the slot. Nothing changes while the
/// feature is off. Throws std::invalid_argument for invalid codes.
[[nodiscard]] SilenceState silence_transition(SilenceState current, ActivityClass detected, bool feature_on);

/// Silence mode bound to a preference file, mirroring the client's use of
/// the "Silence" switch and the "estadoAnterior" slot.
class SilenceMode {
 public:
  static constexpr std::string_view kFeatureKey = "Silence";
  static constexpr std::string_view kStoredKey = "estadoAnterior";

  SilenceMode(Preferences& prefs, int ringer_mode);

  void set_enabled(bool on);
  [[nodiscard]] bool enabled() const;

  /// Applies one detection and persists the saved slot. Returns the new mode.
  int on_activity(ActivityClass detected);

  [[nodiscard]] int ringer_mode() const noexcept { return mode_; }
  void set_ringer_mode(int mode);
  [[nodiscard]] int stored_previous() const;

 private:
  Preferences& prefs_;
  int mode_;
};

}  // namespace mobility::activity
