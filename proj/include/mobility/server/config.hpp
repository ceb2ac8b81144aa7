#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace mobility::server {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path key_dir = "keys";
  int key_bits = 2048;
  bool generate_key = true;  // create a keypair when key_dir has none
  std::string db_path = "mobility.db";
  std::string homepage = "http://localhost:8080/";
  std::filesystem::path static_dir;  // optional analyst UI bundle served at "/"

  // traffic feeds: file paths or http:// URLs; empty disables the feed
  std::string traffic_states;
  std::string traffic_sections;
  std::string traffic_incidences;
  int traffic_refresh_s = 300;

  std::string log_file;  // empty logs to stderr
  std::string log_level = "info";
  int threads = 8;
};

/// Reads a JSON config file (keys as in ServerConfig); unknown keys and bad
/// types throw ConfigError. Environment variables named MOBILITY_<KEY> in
/// upper case override the file.
[[nodiscard]] ServerConfig load_config(const std::optional<std::filesystem::path>& path);

/// Applies MOBILITY_* environment overrides to `config`.
void apply_env(ServerConfig& config);

}  // namespace mobility::server
