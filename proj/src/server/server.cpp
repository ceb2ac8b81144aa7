#include "mobility/server/server.hpp"

#include <httplib.h>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <json.hpp>

#include "mobility/crypto/bench.hpp"
#include "mobility/query/query.hpp"

namespace mobility::server {

namespace {

std::shared_ptr<spdlog::logger> default_logger(const ServerConfig& c) {
  std::shared_ptr<spdlog::logger> log;
  if (c.log_file.empty()) {
    log = std::make_shared<spdlog::logger>("mobility", std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
  } else {
    log = std::make_shared<spdlog::logger>("mobility",
                                           std::make_shared<spdlog::sinks::basic_file_sink_mt>(c.log_file));
  }
  log->set_level(spdlog::level::from_str(c.log_level));
  log->flush_on(spdlog::level::info);
  return log;
}

std::unique_ptr<traffic::TrafficService> make_traffic(const ServerConfig& c) {
  if (c.traffic_states.empty() && c.traffic_sections.empty() && c.traffic_incidences.empty()) return nullptr;
  const auto source = [](const std::string& where) -> traffic::TextSource {
    if (where.empty()) return nullptr;
    if (where.starts_with("http://")) return traffic::http_source(where);
    return traffic::file_source(where);
  };
  traffic::TrafficSources s;
  s.states = source(c.traffic_states);
  s.sections = source(c.traffic_sections);
  if (c.traffic_incidences.starts_with("http://")) {
    s.incidences = std::make_shared<traffic::HttpIncidenceSource>(c.traffic_incidences);
  } else if (!c.traffic_incidences.empty()) {
    s.incidences = std::make_shared<traffic::FixtureIncidenceSource>(c.traffic_incidences);
  }
  return std::make_unique<traffic::TrafficService>(std::move(s), std::chrono::seconds(c.traffic_refresh_s));
}

void reply_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void reply_envelope(httplib::Response& res, int success, std::string_view message, int status = 200) {
  reply_json(res, status, ApiResponse{success, std::string(message)}.to_json());
}

std::optional<std::string> form_value(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

}  // namespace

std::shared_ptr<const crypto::KeyPair> load_or_create_key(const ServerConfig& config) {
  const auto pem = config.key_dir / "private.pem";
  if (std::filesystem::exists(pem)) {
    return std::make_shared<const crypto::KeyPair>(crypto::KeyPair::load_private_pem(pem));
  }
  if (!config.generate_key) return nullptr;
  auto key = std::make_shared<const crypto::KeyPair>(crypto::KeyPair::generate(config.key_bits));
  key->save(config.key_dir);
  return key;
}

struct IngestServer::Http {
  httplib::Server server;
};

IngestServer::IngestServer(ServerConfig config, std::shared_ptr<spdlog::logger> logger)
    : config_(std::move(config)),
      log_(logger ? std::move(logger) : default_logger(config_)),
      store_(std::make_unique<store::Store>(config_.db_path)),
      broker_(config_.homepage),
      traffic_(make_traffic(config_)),
      http_(std::make_unique<Http>()),
      key_(load_or_create_key(config_)) {
  install_routes();
}

IngestServer::~IngestServer() { stop(); }

std::string IngestServer::base_url() const { return "http://" + config_.host + ":" + std::to_string(port_); }

std::shared_ptr<const crypto::KeyPair> IngestServer::key() const {
  std::lock_guard lock(key_mu_);
  return key_;
}

void IngestServer::set_key(std::shared_ptr<const crypto::KeyPair> key) {
  std::lock_guard lock(key_mu_);
  key_ = std::move(key);
}

ServerStats IngestServer::stats() const {
  const auto k = key();
  return {requests_.load(), decrypts_.load(), static_cast<double>(decrypt_ns_.load()) * 1e-9,
          crypto::process_cpu_seconds(), k ? k->modulus_bits() : 0};
}

std::string IngestServer::decrypt(std::string_view hex) {
  const auto k = key();
  if (!k) throw crypto::CryptoError("no key");
  const auto t0 = std::chrono::steady_clock::now();
  auto out = crypto::decrypt_field({std::string(hex)}, *k);
  decrypt_ns_ += static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count());
  ++decrypts_;
  return out;
}

void IngestServer::install_routes() {
  auto& s = http_->server;
  s.new_task_queue = [n = config_.threads] { return new httplib::ThreadPool(static_cast<std::size_t>(n)); };

  // only the route and status are logged; request bodies carry identities
  s.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
    ++requests_;
    log_->info("{} {} -> {}", req.method, req.path, res.status);
  });
  s.set_exception_handler([this](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      log_->error("{} {} failed: {}", req.method, req.path, e.what());
    } catch (...) {
      log_->error("{} {} failed", req.method, req.path);
    }
    reply_envelope(res, 0, kOops, 500);
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) reply_envelope(res, 0, res.status == 404 ? "Not found" : kOops, res.status);
  });

  s.Get("/certs/public.der", [this](const httplib::Request&, httplib::Response& res) {
    const auto k = key();
    if (!k) {
      reply_envelope(res, 0, kOops, 503);
      return;
    }
    const auto& der = k->public_der();
    res.set_content(std::string(der.begin(), der.end()), "application/octet-stream");
  });

  const auto reg = [this](const httplib::Request& req, httplib::Response& res) {
    const auto hash_enc = form_value(req, "usu_hash_enc");
    const auto regid_enc = form_value(req, "reg_id_enc");
    if (!hash_enc || !regid_enc) {
      reply_envelope(res, 0, kMissing);
      return;
    }
    try {
      const auto hash = decrypt(*hash_enc);
      const auto regid = decrypt(*regid_enc);
      store::UserProfile profile;
      const auto opt_field = [&](const char* name) -> std::optional<std::string> {
        const auto v = form_value(req, name);
        if (!v || v->empty()) return std::nullopt;
        return decrypt(*v);
      };
      profile.nombre = opt_field("nombre_enc");
      profile.apellido = opt_field("apellido_enc");
      if (const auto p = opt_field("peso_enc")) profile.peso = std::stod(*p);
      if (const auto n = opt_field("nacimiento_enc")) profile.nacimiento = CivilDate::parse(*n);
      profile.genero = opt_field("genero_enc");
      profile.mail = opt_field("mail_enc");
      store_->upsert_user(hash, regid, profile);
      if (!regid.empty()) broker_.register_device(regid, hash, form_value(req, "app_version").value_or(""));
      reply_envelope(res, 1, kInserted);
    } catch (const std::exception& e) {
      log_->warn("registration rejected: {}", e.what());
      reply_envelope(res, 0, kOops);
    }
  };
  s.Post("/register", reg);
  s.Post("/create_regid.php", reg);

  const auto upload = [this](const httplib::Request& req, httplib::Response& res) {
    const auto hash_enc = form_value(req, "usu_hash_enc");
    const auto payload = form_value(req, "payload");
    if (!hash_enc || !payload) {
      reply_envelope(res, 0, kMissing);
      return;
    }
    std::vector<ParsedSegment> segments;
    CivilDate date = CivilDate::today_utc();
    try {
      segments = parse_segments(*payload);
      if (const auto d = form_value(req, "date"); d && !d->empty()) date = CivilDate::parse(*d);
    } catch (const std::exception& e) {
      log_->warn("upload rejected: {}", e.what());
      reply_envelope(res, 0, kMissing);
      return;
    }
    try {
      const auto hash = decrypt(*hash_enc);
      if (!store_->find_user(hash)) throw store::StoreError("no such user");
      for (const auto& p : segments) {
        const auto id = store::store_segment(*store_, hash, p.segment, date);
        log_->debug("stored segment {} with {} locations", id, p.segment.locations.size());
      }
      reply_envelope(res, 1, kInserted);
    } catch (const std::exception& e) {
      log_->warn("upload failed: {}", e.what());
      reply_envelope(res, 0, kOops);
    }
  };
  s.Post("/segments", upload);
  s.Post("/insert.php", upload);

  const auto query = [this](bool force_csv) {
    return [this, force_csv](const httplib::Request& req, httplib::Response& res) {
      const query::ParamLookup lookup = [&req, force_csv](std::string_view name) -> std::optional<std::string> {
        const std::string key(name);
        if (force_csv && key == "format") return std::string("csv");
        if (!req.has_param(key)) return std::nullopt;
        return req.get_param_value(key);
      };
      auto reply = query::handle_query(*store_, lookup, CivilDate::today_utc().year);
      for (const auto& [k, v] : reply.headers) res.set_header(k, v);
      res.status = reply.status;
      res.set_content(reply.body, reply.content_type);
    };
  };
  s.Get("/query", query(false));
  s.Post("/query", query(false));
  s.Get("/getLocations.php", query(false));
  s.Post("/getLocations.php", query(false));
  s.Get("/getCSV.php", query(true));
  s.Post("/getCSV.php", query(true));

  s.Get("/activities", [this](const httplib::Request&, httplib::Response& res) {
    const auto reply = query::handle_activities(*store_);
    res.set_content(reply.body, reply.content_type);
  });

  s.Get("/traffic", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::ordered_json out;
    if (traffic_) {
      const auto snap = traffic_->current();
      out = traffic::to_geojson(snap->layer);
      out["warnings"] = snap->warnings;
    } else {
      out = traffic::to_geojson({});
      out["warnings"] = nlohmann::ordered_json::array();
    }
    res.set_content(out.dump(), "application/geo+json");
  });

  s.Post("/admin/push", [this](const httplib::Request& req, httplib::Response& res) {
    const auto title = form_value(req, "title");
    const auto body = form_value(req, "body");
    if (!title || !body) {
      reply_envelope(res, 0, kMissing, 400);
      return;
    }
    const auto n = broker_.push(*title, *body, form_value(req, "target"), form_value(req, "click_url"));
    reply_json(res, 200, nlohmann::ordered_json{{"delivered", n}}.dump());
  });

  s.Get(R"(/inbox/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& m : broker_.poll_inbox(req.matches[1])) list.push_back(m.to_json());
      reply_json(res, 200, nlohmann::ordered_json{{"messages", std::move(list)}}.dump());
    } catch (const notify::NotifyError& e) {
      reply_envelope(res, 0, e.what(), 404);
    }
  });

  s.Get("/admin/stats", [this](const httplib::Request&, httplib::Response& res) {
    const auto st = stats();
    nlohmann::ordered_json j{{"requests", st.requests},
                             {"decrypts", st.decrypts},
                             {"decrypt_seconds", st.decrypt_seconds},
                             {"cpu_seconds", st.cpu_seconds},
                             {"key_bits", st.key_bits},
                             {"users", store_->count_users()},
                             {"segments", store_->count_segments()},
                             {"locations", store_->count_locations()}};
    reply_json(res, 200, j.dump());
  });

  if (!config_.static_dir.empty()) s.set_mount_point("/", config_.static_dir.string());
}

int IngestServer::bind() {
  auto& s = http_->server;
  if (config_.port == 0) {
    port_ = s.bind_to_any_port(config_.host);
  } else {
    port_ = s.bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (port_ <= 0) throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  log_->info("listening on {}", base_url());
  return port_;
}

int IngestServer::start() {
  const int p = bind();
  thread_ = std::thread([this] { http_->server.listen_after_bind(); });
  http_->server.wait_until_ready();
  return p;
}

void IngestServer::run() {
  bind();
  http_->server.listen_after_bind();
}

void IngestServer::stop() {
  if (http_) http_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace mobility::server
