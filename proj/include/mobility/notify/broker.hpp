#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mobility::notify {

class NotifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PushMessage {
  std::string title;
  std::string body;
  std::string click_url;
  std::string to_regid;
  std::chrono::system_clock::time_point delivered_at;

  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// In-process stand-in for the push service. Devices register a regid for a
/// user hash and app version; messages queue per device until polled.
/// All members are safe to call concurrently.
class Broker {
 public:
  explicit Broker(std::string homepage) : homepage_(std::move(homepage)) {}

  /// Idempotent. A new regid for a known hash replaces the old device and
  /// drops its inbox. Throws NotifyError for an empty regid.
  void register_device(const std::string& regid, const std::string& usu_hash, const std::string& app_version);

  /// False when unknown or registered under another app version.
  [[nodiscard]] bool is_registered(const std::string& regid, const std::string& app_version) const;

  /// Queues the message for one device, or for every device when `target` is
  /// empty. Returns how many inboxes received it; unknown targets give 0.
  std::size_t push(const std::string& title, const std::string& body,
                   const std::optional<std::string>& target = std::nullopt,
                   const std::optional<std::string>& click_url = std::nullopt);

  /// Drains the device inbox in send order. Throws NotifyError("unknown device").
  std::vector<PushMessage> poll_inbox(const std::string& regid);

  [[nodiscard]] std::size_t device_count() const;
  [[nodiscard]] const std::string& homepage() const noexcept { return homepage_; }

 private:
  struct Device {
    std::string usu_hash;
    std::string app_version;
    std::deque<PushMessage> inbox;
  };

  std::string homepage_;
  mutable std::mutex mu_;
  std::map<std::string, Device> devices_;               // by regid
  std::map<std::string, std::string> regid_by_hash_;
};

}  // namespace mobility::notify
