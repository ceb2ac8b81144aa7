#include "mobility/notify/broker.hpp"

namespace mobility::notify {

nlohmann::ordered_json PushMessage::to_json() const {
  return {{"title", title},
          {"body", body},
          {"click_url", click_url},
          {"to_regid", to_regid},
          {"delivered_at",
           std::chrono::duration_cast<std::chrono::milliseconds>(delivered_at.time_since_epoch()).count()}};
}

void Broker::register_device(const std::string& regid, const std::string& usu_hash, const std::string& app_version) {
  if (regid.empty()) throw NotifyError("empty regid");
  std::lock_guard lock(mu_);
  if (auto it = regid_by_hash_.find(usu_hash); it != regid_by_hash_.end() && it->second != regid) {
    devices_.erase(it->second);
  }
  auto& device = devices_[regid];
  if (!device.usu_hash.empty() && device.usu_hash != usu_hash) regid_by_hash_.erase(device.usu_hash);
  device.usu_hash = usu_hash;
  device.app_version = app_version;
  regid_by_hash_[usu_hash] = regid;
}

bool Broker::is_registered(const std::string& regid, const std::string& app_version) const {
  std::lock_guard lock(mu_);
  const auto it = devices_.find(regid);
  return it != devices_.end() && it->second.app_version == app_version;
}

std::size_t Broker::push(const std::string& title, const std::string& body, const std::optional<std::string>& target,
                         const std::optional<std::string>& click_url) {
  std::lock_guard lock(mu_);
  const auto now = std::chrono::system_clock::now();
  const auto deliver = [&](const std::string& regid, Device& d) {
    d.inbox.push_back({title, body, click_url.value_or(homepage_), regid, now});
  };
  if (target && !target->empty()) {
    const auto it = devices_.find(*target);
    if (it == devices_.end()) return 0;
    deliver(it->first, it->second);
    return 1;
  }
  for (auto& [regid, d] : devices_) deliver(regid, d);
  return devices_.size();
}

std::vector<PushMessage> Broker::poll_inbox(const std::string& regid) {
  std::lock_guard lock(mu_);
  const auto it = devices_.find(regid);
  if (it == devices_.end()) throw NotifyError("unknown device");
  std::vector<PushMessage> out(std::make_move_iterator(it->second.inbox.begin()),
                               std::make_move_iterator(it->second.inbox.end()));
  it->second.inbox.clear();
  return out;
}

std::size_t Broker::device_count() const {
  std::lock_guard lock(mu_);
  return devices_.size();
}

}  // namespace mobility::notify
