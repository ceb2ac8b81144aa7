#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "mobility/crypto/rsa_envelope.hpp"
#include "mobility/server/api_response.hpp"
#include "mobility/notify/broker.hpp"
#include "mobility/server/config.hpp"
#include "mobility/store/store.hpp"
#include "mobility/traffic/layer.hpp"

namespace spdlog {
class logger;
}

namespace mobility::server {

struct ServerStats {
  std::uint64_t requests = 0;
  std::uint64_t decrypts = 0;
  double decrypt_seconds = 0.0;
  double cpu_seconds = 0.0;
  int key_bits = 0;
};

/// HTTP front end: key distribution, encrypted registration and upload,
/// analyst queries, traffic layer and the push broker.
class IngestServer {
 public:
  explicit IngestServer(ServerConfig config, std::shared_ptr<spdlog::logger> logger = nullptr);
  ~IngestServer();
  IngestServer(const IngestServer&) = delete;
  IngestServer& operator=(const IngestServer&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();
  [[nodiscard]] int port() const noexcept { return port_; }
  [[nodiscard]] std::string base_url() const;

  [[nodiscard]] std::shared_ptr<const crypto::KeyPair> key() const;
  /// Replaces (or with nullptr removes) the serving keypair.
  void set_key(std::shared_ptr<const crypto::KeyPair> key);

  [[nodiscard]] store::Store& store() noexcept { return *store_; }
  [[nodiscard]] notify::Broker& broker() noexcept { return broker_; }
  [[nodiscard]] ServerStats stats() const;

 private:
  struct Http;
  void install_routes();
  int bind();
  std::string decrypt(std::string_view hex);

  ServerConfig config_;
  std::shared_ptr<spdlog::logger> log_;
  std::unique_ptr<store::Store> store_;
  notify::Broker broker_;
  std::unique_ptr<traffic::TrafficService> traffic_;
  std::unique_ptr<Http> http_;
  std::thread thread_;
  int port_ = 0;

  mutable std::mutex key_mu_;
  std::shared_ptr<const crypto::KeyPair> key_;

  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> decrypts_{0};
  std::atomic<std::uint64_t> decrypt_ns_{0};
};

/// The keypair in key_dir, generating and saving one when allowed.
/// Returns nullptr when there is none.
[[nodiscard]] std::shared_ptr<const crypto::KeyPair> load_or_create_key(const ServerConfig& config);

}  // namespace mobility::server
