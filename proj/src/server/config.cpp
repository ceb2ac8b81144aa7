#include "mobility/server/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>

namespace mobility::server {

namespace {

using Setter = std::function<void(ServerConfig&, const nlohmann::json&)>;

template <typename T, typename Member>
Setter field(Member member) {
  return [member](ServerConfig& c, const nlohmann::json& v) { c.*member = v.get<T>(); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"host", field<std::string>(&ServerConfig::host)},
      {"port", field<int>(&ServerConfig::port)},
      {"key_dir", field<std::string>(&ServerConfig::key_dir)},
      {"key_bits", field<int>(&ServerConfig::key_bits)},
      {"generate_key", field<bool>(&ServerConfig::generate_key)},
      {"db_path", field<std::string>(&ServerConfig::db_path)},
      {"homepage", field<std::string>(&ServerConfig::homepage)},
      {"static_dir", field<std::string>(&ServerConfig::static_dir)},
      {"traffic_states", field<std::string>(&ServerConfig::traffic_states)},
      {"traffic_sections", field<std::string>(&ServerConfig::traffic_sections)},
      {"traffic_incidences", field<std::string>(&ServerConfig::traffic_incidences)},
      {"traffic_refresh_s", field<int>(&ServerConfig::traffic_refresh_s)},
      {"log_file", field<std::string>(&ServerConfig::log_file)},
      {"log_level", field<std::string>(&ServerConfig::log_level)},
      {"threads", field<int>(&ServerConfig::threads)},
  };
  return table;
}

void set(ServerConfig& c, const std::string& key, const nlohmann::json& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key \"" + key + "\"");
  try {
    it->second(c, value);
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for config key \"" + key + "\"");
  }
}

void validate(const ServerConfig& c) {
  if (c.port < 0 || c.port > 65535) throw ConfigError("port out of range");
  if (c.key_bits != 2048 && c.key_bits != 4096) throw ConfigError("key_bits must be 2048 or 4096");
  if (c.threads < 1) throw ConfigError("threads must be positive");
  if (c.traffic_refresh_s < 1) throw ConfigError("traffic_refresh_s must be positive");
}

}  // namespace

void apply_env(ServerConfig& config) {
  for (const auto& [key, setter] : setters()) {
    std::string name = "MOBILITY_";
    for (const char ch : key) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    const char* raw = std::getenv(name.c_str());
    if (raw == nullptr) continue;
    const std::string text = raw;
    // numbers and booleans arrive as text
    auto value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded() || value.is_object() || value.is_array() || value.is_string()) value = text;
    try {
      setter(config, value);
    } catch (const nlohmann::json::exception&) {
      try {
        setter(config, nlohmann::json(text));
      } catch (const nlohmann::json::exception&) {
        throw ConfigError("bad value in " + name);
      }
    }
  }
  validate(config);
}

ServerConfig load_config(const std::optional<std::filesystem::path>& path) {
  ServerConfig config;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config " + path->string());
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) set(config, key, value);
  }
  apply_env(config);
  return config;
}

}  // namespace mobility::server
