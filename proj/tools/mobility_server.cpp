// Ingest, query, traffic and push server.
#include <CLI11.hpp>
#include <csignal>
#include <iostream>

#include "mobility/server/server.hpp"

namespace {

mobility::server::IngestServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobility data server"};
  std::optional<std::string> config_path;
  std::optional<std::string> host, db, key_dir, static_dir, states, sections, incidences, log_file, log_level;
  std::optional<int> port, key_bits;
  bool no_keygen = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--host", host, "Listen address");
  app.add_option("--port", port, "Listen port (0 picks one)");
  app.add_option("--db", db, "SQLite database path");
  app.add_option("--key-dir", key_dir, "Directory holding private.pem and public.der");
  app.add_option("--key-bits", key_bits, "Size of a newly generated key")->check(CLI::IsMember({2048, 4096}));
  app.add_flag("--no-keygen", no_keygen, "Do not create a key when none exists");
  app.add_option("--static-dir", static_dir, "Analyst UI bundle served at /");
  app.add_option("--traffic-states", states, "State feed file or http:// URL");
  app.add_option("--traffic-sections", sections, "Sections CSV file or http:// URL");
  app.add_option("--traffic-incidences", incidences, "Incidences JSON file or http:// URL");
  app.add_option("--log-file", log_file, "Log file (stderr when unset)");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");
  CLI11_PARSE(app, argc, argv);

  mobility::server::ServerConfig config;
  try {
    config = mobility::server::load_config(config_path);
    if (host) config.host = *host;
    if (port) config.port = *port;
    if (db) config.db_path = *db;
    if (key_dir) config.key_dir = *key_dir;
    if (key_bits) config.key_bits = *key_bits;
    if (no_keygen) config.generate_key = false;
    if (static_dir) config.static_dir = *static_dir;
    if (states) config.traffic_states = *states;
    if (sections) config.traffic_sections = *sections;
    if (incidences) config.traffic_incidences = *incidences;
    if (log_file) config.log_file = *log_file;
    if (log_level) config.log_level = *log_level;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    mobility::server::IngestServer server(config);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.run();
    g_server = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
