#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mobility/core/date.hpp"
#include "mobility/server/api_response.hpp"
#include "mobility/sim/pipeline.hpp"

namespace mobility::sim {

/// Bad client configuration (maps to exit code 2).
class ClientConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ClientProfile {
  std::optional<std::string> nombre;
  std::optional<std::string> apellido;
  std::optional<double> peso;
  std::optional<CivilDate> nacimiento;
  std::optional<std::string> genero;
  std::optional<std::string> mail;
};

struct ClientConfig {
  std::string server_url = "http://127.0.0.1:8080";
  std::filesystem::path prefs_path = "mobsim_prefs.xml";
  ClientProfile profile;
  bool silence_feature = true;
  std::string app_version = "1";
  std::optional<CivilDate> date;  // upload date; today when unset
  int timeout_s = 30;
};

/// JSON file with keys server_url, prefs_path, silence_feature, app_version,
/// date, timeout_s and a "profile" object. Throws ClientConfigError.
[[nodiscard]] ClientConfig load_client_config(const std::filesystem::path& path);

/// The device identity, kept in the preference file across runs.
struct Identity {
  std::string usu_hash;
  std::string regid;
};

inline constexpr std::string_view kHashKey = "usu_hash";
inline constexpr std::string_view kRegidKey = "regid";

/// Reads the identity from the preference file, creating and committing
/// random alphanumeric values the first time.
[[nodiscard]] Identity load_or_create_identity(const std::filesystem::path& prefs_path);

struct SegmentResult {
  std::string activity;
  std::size_t samples = 0;
  std::optional<server::ApiResponse> response;
  std::string error;  // transport or protocol failure

  [[nodiscard]] bool ok() const { return response && response->success == 1; }
};

struct UploadReport {
  std::optional<server::ApiResponse> registration;
  std::string error;  // fatal failure before or during registration
  std::vector<SegmentResult> segments;
  std::vector<WindowDecision> windows;
  std::size_t samples_generated = 0;
  std::size_t samples_uploaded = 0;

  [[nodiscard]] bool ok() const;
  /// 0 when everything was stored, 1 otherwise.
  [[nodiscard]] int exit_code() const { return ok() ? 0 : 1; }
  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Fetches the server key, registers the device, runs the trace through the
/// client pipeline and uploads every segment. Failures are recorded in the
/// report rather than thrown.
[[nodiscard]] UploadReport run_upload(const ClientConfig& config, const std::vector<TraceSample>& trace);

struct LoadReport {
  int key_bits = 0;
  std::size_t sent = 0;
  std::size_t succeeded = 0;
  std::size_t late = 0;
  std::vector<double> latencies_s;
  double mean_latency_s = 0.0;
  double p50_latency_s = 0.0;
  double p95_latency_s = 0.0;
  double max_latency_s = 0.0;
  double server_cpu_s = 0.0;       // server process CPU time consumed during the run
  std::uint64_t server_decrypts = 0;
  double server_mean_decrypt_s = 0.0;

  [[nodiscard]] bool empty() const noexcept { return sent == 0; }
  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Sends one encrypted registration per period for the duration, on a fixed
/// cadence. When `expected_key_bits` is set, a server key of another size is
/// a ClientConfigError. A zero duration gives an empty report.
[[nodiscard]] LoadReport load_test(const ClientConfig& config, std::chrono::duration<double> period,
                                   std::chrono::duration<double> duration,
                                   std::optional<int> expected_key_bits = std::nullopt);

/// Drains this device's inbox on the server.
[[nodiscard]] nlohmann::ordered_json fetch_inbox(const ClientConfig& config);

}  // namespace mobility::sim
