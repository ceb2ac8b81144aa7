#include "mobility/sim/client.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include "mobility/activity/preferences.hpp"
#include "mobility/crypto/rsa_envelope.hpp"

namespace mobility::sim {

namespace {

using Clock = std::chrono::steady_clock;

std::string random_alnum(std::size_t n) {
  static constexpr std::string_view kAlphabet = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::random_device rd;
  std::uniform_int_distribution<std::size_t> pick(0, kAlphabet.size() - 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(kAlphabet[pick(rd)]);
  return out;
}

Identity identity_from(activity::Preferences& prefs) {
  Identity id{prefs.get_string(kHashKey, ""), prefs.get_string(kRegidKey, "")};
  bool changed = false;
  if (id.usu_hash.empty()) {
    id.usu_hash = random_alnum(32);
    prefs.put_string(kHashKey, id.usu_hash);
    changed = true;
  }
  if (id.regid.empty()) {
    id.regid = "sim-" + random_alnum(40);
    prefs.put_string(kRegidKey, id.regid);
    changed = true;
  }
  if (changed) prefs.commit();
  return id;
}

std::unique_ptr<httplib::Client> make_client(const ClientConfig& c) {
  if (!c.server_url.starts_with("http://")) throw ClientConfigError("server URL must start with http://");
  auto client = std::make_unique<httplib::Client>(c.server_url);
  if (!client->is_valid()) throw ClientConfigError("bad server URL " + c.server_url);
  client->set_connection_timeout(std::chrono::seconds(c.timeout_s));
  client->set_read_timeout(std::chrono::seconds(c.timeout_s));
  client->set_write_timeout(std::chrono::seconds(c.timeout_s));
  client->set_keep_alive(true);
  return client;
}

crypto::PublicKey fetch_key(httplib::Client& client) {
  const auto res = client.Get("/certs/public.der");
  if (!res) throw std::runtime_error("cannot reach server: " + httplib::to_string(res.error()));
  if (res->status != 200) throw std::runtime_error("public key unavailable (HTTP " + std::to_string(res->status) + ")");
  const std::vector<std::uint8_t> der(res->body.begin(), res->body.end());
  return crypto::PublicKey::from_der(der);
}

server::ApiResponse post_form(httplib::Client& client, const std::string& path, const httplib::Params& form) {
  const auto res = client.Post(path, form);
  if (!res) throw std::runtime_error("request failed: " + httplib::to_string(res.error()));
  return server::ApiResponse::parse(res->body);
}

httplib::Params registration_form(const Identity& id, const crypto::PublicKey& key, const ClientConfig& c) {
  httplib::Params form{{"usu_hash_enc", crypto::encrypt_field(id.usu_hash, key).hex},
                       {"reg_id_enc", crypto::encrypt_field(id.regid, key).hex},
                       {"app_version", c.app_version}};
  const auto add = [&](const char* name, const std::optional<std::string>& v) {
    if (v) form.emplace(name, crypto::encrypt_field(*v, key).hex);
  };
  const auto& p = c.profile;
  add("nombre_enc", p.nombre);
  add("apellido_enc", p.apellido);
  if (p.peso) add("peso_enc", std::to_string(*p.peso));
  if (p.nacimiento) add("nacimiento_enc", p.nacimiento->to_string());
  add("genero_enc", p.genero);
  add("mail_enc", p.mail);
  return form;
}

nlohmann::ordered_json envelope_json(const std::optional<server::ApiResponse>& r) {
  if (!r) return nullptr;
  return {{"success", r->success}, {"message", r->message}};
}

nlohmann::json get_stats(httplib::Client& client) {
  const auto res = client.Get("/admin/stats");
  if (!res || res->status != 200) throw std::runtime_error("server stats unavailable");
  return nlohmann::json::parse(res->body);
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
  return v[std::min(idx, v.size() - 1)];
}

}  // namespace

ClientConfig load_client_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ClientConfigError("cannot open config " + path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ClientConfigError("config must be a JSON object");
  ClientConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "server_url") {
        c.server_url = v.get<std::string>();
      } else if (key == "prefs_path") {
        c.prefs_path = v.get<std::string>();
      } else if (key == "silence_feature") {
        c.silence_feature = v.get<bool>();
      } else if (key == "app_version") {
        c.app_version = v.get<std::string>();
      } else if (key == "date") {
        c.date = CivilDate::parse(v.get<std::string>());
      } else if (key == "timeout_s") {
        c.timeout_s = v.get<int>();
      } else if (key == "profile") {
        for (const auto& [pk, pv] : v.items()) {
          if (pk == "nombre") {
            c.profile.nombre = pv.get<std::string>();
          } else if (pk == "apellido") {
            c.profile.apellido = pv.get<std::string>();
          } else if (pk == "peso") {
            c.profile.peso = pv.get<double>();
          } else if (pk == "nacimiento") {
            c.profile.nacimiento = CivilDate::parse(pv.get<std::string>());
          } else if (pk == "genero") {
            c.profile.genero = pv.get<std::string>();
          } else if (pk == "mail") {
            c.profile.mail = pv.get<std::string>();
          } else {
            throw ClientConfigError("unknown profile key \"" + pk + "\"");
          }
        }
      } else {
        throw ClientConfigError("unknown config key \"" + key + "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ClientConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ClientConfigError(std::string("bad config value: ") + e.what());
  }
  if (c.timeout_s <= 0) throw ClientConfigError("timeout_s must be positive");
  return c;
}

Identity load_or_create_identity(const std::filesystem::path& prefs_path) {
  activity::Preferences prefs(prefs_path);
  return identity_from(prefs);
}

bool UploadReport::ok() const {
  if (!error.empty() || !registration || registration->success != 1) return false;
  if (!std::all_of(segments.begin(), segments.end(), [](const SegmentResult& s) { return s.ok(); })) return false;
  return samples_uploaded == samples_generated;
}

nlohmann::ordered_json UploadReport::to_json() const {
  nlohmann::ordered_json segs = nlohmann::ordered_json::array();
  for (const auto& s : segments) {
    nlohmann::ordered_json j{{"activity", s.activity}, {"samples", s.samples}, {"response", envelope_json(s.response)}};
    if (!s.error.empty()) j["error"] = s.error;
    segs.push_back(std::move(j));
  }
  nlohmann::ordered_json ringer = nlohmann::ordered_json::array();
  for (const auto& w : windows) {
    ringer.push_back({{"start_s", w.start_s},
                      {"base", to_string(w.base)},
                      {"refined", to_string(w.refined)},
                      {"ringer_mode", w.ringer_mode}});
  }
  nlohmann::ordered_json j{{"ok", ok()},
                           {"registration", envelope_json(registration)},
                           {"samples_generated", samples_generated},
                           {"samples_uploaded", samples_uploaded},
                           {"segments", std::move(segs)},
                           {"windows", std::move(ringer)}};
  if (!error.empty()) j["error"] = error;
  return j;
}

UploadReport run_upload(const ClientConfig& config, const std::vector<TraceSample>& trace) {
  UploadReport report;
  report.samples_generated = trace.size();
  try {
    activity::Preferences prefs(config.prefs_path);
    const auto id = identity_from(prefs);
    activity::SilenceMode silence(prefs, activity::kRingerNormal);
    silence.set_enabled(config.silence_feature);

    auto client = make_client(config);
    const auto key = fetch_key(*client);
    report.registration = post_form(*client, "/register", registration_form(id, key, config));
    if (report.registration->success != 1) {
      report.error = "registration refused: " + report.registration->message;
      return report;
    }

    const auto processed = process_trace(trace, silence);
    report.windows = processed.windows;
    const auto date = config.date.value_or(CivilDate::today_utc()).to_string();
    for (const auto& seg : processed.segments) {
      SegmentResult r;
      r.activity = std::string(to_string(seg.activity));
      r.samples = seg.locations.size();
      try {
        r.response = post_form(*client, "/segments",
                               {{"usu_hash_enc", crypto::encrypt_field(id.usu_hash, key).hex},
                                {"payload", serialize_segment(seg, true)},
                                {"date", date}});
        if (r.ok()) report.samples_uploaded += r.samples;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      report.segments.push_back(std::move(r));
    }
  } catch (const ClientConfigError&) {
    throw;
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  return report;
}

nlohmann::ordered_json LoadReport::to_json() const {
  return {{"key_bits", key_bits},
          {"sent", sent},
          {"succeeded", succeeded},
          {"late", late},
          {"mean_latency_s", mean_latency_s},
          {"p50_latency_s", p50_latency_s},
          {"p95_latency_s", p95_latency_s},
          {"max_latency_s", max_latency_s},
          {"server_cpu_s", server_cpu_s},
          {"server_decrypts", server_decrypts},
          {"server_mean_decrypt_s", server_mean_decrypt_s}};
}

LoadReport load_test(const ClientConfig& config, std::chrono::duration<double> period,
                     std::chrono::duration<double> duration, std::optional<int> expected_key_bits) {
  if (period.count() <= 0.0) throw ClientConfigError("period must be positive");
  if (duration.count() < 0.0) throw ClientConfigError("duration must not be negative");
  LoadReport report;
  const auto count = static_cast<std::size_t>(std::floor(duration.count() / period.count() + 1e-9));

  auto client = make_client(config);
  const auto key = fetch_key(*client);
  report.key_bits = key.modulus_bits();
  if (expected_key_bits && *expected_key_bits != report.key_bits) {
    throw ClientConfigError("server key has " + std::to_string(report.key_bits) + " bits, expected " +
                            std::to_string(*expected_key_bits));
  }
  if (count == 0) return report;
  const auto id = load_or_create_identity(config.prefs_path);

  const auto before = get_stats(*client);
  const auto start = Clock::now();
  for (std::size_t i = 0; i < count; ++i) {
    const auto slot = start + std::chrono::duration_cast<Clock::duration>(period * static_cast<double>(i));
    const auto form = registration_form(id, key, config);
    if (Clock::now() > slot) {
      if (i > 0) ++report.late;
    } else {
      std::this_thread::sleep_until(slot);
    }
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = post_form(*client, "/register", form).success == 1;
    } catch (const std::exception&) {
      ok = false;
    }
    report.latencies_s.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    ++report.sent;
    report.succeeded += ok;
  }
  const auto after = get_stats(*client);

  report.mean_latency_s =
      std::accumulate(report.latencies_s.begin(), report.latencies_s.end(), 0.0) / static_cast<double>(report.sent);
  report.p50_latency_s = percentile(report.latencies_s, 0.50);
  report.p95_latency_s = percentile(report.latencies_s, 0.95);
  report.max_latency_s = *std::max_element(report.latencies_s.begin(), report.latencies_s.end());
  report.server_cpu_s = after["cpu_seconds"].get<double>() - before["cpu_seconds"].get<double>();
  report.server_decrypts = after["decrypts"].get<std::uint64_t>() - before["decrypts"].get<std::uint64_t>();
  if (report.server_decrypts > 0) {
    report.server_mean_decrypt_s = (after["decrypt_seconds"].get<double>() - before["decrypt_seconds"].get<double>()) /
                                   static_cast<double>(report.server_decrypts);
  }
  return report;
}

nlohmann::ordered_json fetch_inbox(const ClientConfig& config) {
  const auto id = load_or_create_identity(config.prefs_path);
  auto client = make_client(config);
  const auto res = client->Get("/inbox/" + id.regid);
  if (!res) throw std::runtime_error("cannot reach server: " + httplib::to_string(res.error()));
  return nlohmann::ordered_json::parse(res->body);
}

}  // namespace mobility::sim
