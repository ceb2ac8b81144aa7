// Synthetic mobility client: trace generation, upload, load test, inbox.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "mobility/activity/preferences.hpp"
#include "mobility/sim/client.hpp"

using namespace mobility;

namespace {

constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::optional<std::string> config_path;
  std::optional<std::string> server;
  std::optional<std::string> prefs;
  std::optional<std::string> date;
  std::uint64_t seed = 1;
  std::size_t legs = 6;
  std::string priority = "balanced_power_accuracy";
  double noise = 0.1;
};

sim::ClientConfig client_config(const Options& o) {
  sim::ClientConfig c = o.config_path ? sim::load_client_config(*o.config_path) : sim::ClientConfig{};
  if (o.server) c.server_url = *o.server;
  if (o.prefs) c.prefs_path = *o.prefs;
  if (o.date) {
    try {
      c.date = CivilDate::parse(*o.date);
    } catch (const std::invalid_argument& e) {
      throw sim::ClientConfigError(e.what());
    }
  }
  return c;
}

sim::TraceSpec trace_spec(const Options& o) {
  auto spec = sim::random_spec(o.seed, o.legs);
  const auto p = activity::priority_from_string(o.priority);
  if (!p) throw sim::ClientConfigError("unknown priority " + o.priority);
  spec.priority = *p;
  spec.label_noise = o.noise;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic mobility client"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Client JSON config");
  app.add_option("--server", o.server, "Server base URL, e.g. http://127.0.0.1:8080");
  app.add_option("--prefs", o.prefs, "Preference file holding the device identity");
  app.add_option("--seed", o.seed, "Trace seed");

  auto* gen = app.add_subcommand("gen", "Generate a trace and print its segments");
  std::optional<std::string> out_path;
  gen->add_option("--out", out_path, "Write segments here instead of stdout");
  bool silence_off = false;
  for (auto* sub : {gen, app.add_subcommand("upload", "Generate, segment and upload a trace")}) {
    sub->add_option("--legs", o.legs, "Number of legs")->check(CLI::Range(1, 50));
    sub->add_option("--priority", o.priority, "Location profile");
    sub->add_option("--noise", o.noise, "Recognizer label noise")->check(CLI::Range(0.0, 1.0));
    sub->add_flag("--no-silence", silence_off, "Turn the silence feature off");
  }
  auto* upload = app.get_subcommand("upload");
  upload->add_option("--date", o.date, "Upload date YYYY-MM-DD (default today)");

  auto* load = app.add_subcommand("loadtest", "Send encrypted registrations at a fixed cadence");
  double period = 10.0;
  double duration = 60.0;
  std::optional<int> key_bits;
  load->add_option("--period", period, "Seconds between requests")->check(CLI::PositiveNumber);
  load->add_option("--duration", duration, "Seconds to run")->check(CLI::NonNegativeNumber);
  load->add_option("--key-bits", key_bits, "Expected server key size")->check(CLI::IsMember({2048, 4096}));

  auto* inbox = app.add_subcommand("inbox", "Drain this device's push inbox");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      const auto trace = sim::generate_trace(trace_spec(o));
      activity::Preferences scratch;
      activity::SilenceMode silence(scratch, activity::kRingerNormal);
      silence.set_enabled(!silence_off);
      const auto processed = sim::process_trace(trace, silence);
      const auto text = serialize_segments(processed.segments, true);
      if (out_path) {
        std::ofstream out(*out_path, std::ios::binary);
        if (!out) throw sim::ClientConfigError("cannot write " + *out_path);
        out << text << "\n";
        std::cerr << processed.segments.size() << " segments, " << trace.size() << " samples\n";
      } else {
        std::cout << text << "\n";
      }
      return 0;
    }
    auto config = client_config(o);
    if (upload->parsed()) {
      config.silence_feature = config.silence_feature && !silence_off;
      const auto trace = sim::generate_trace(trace_spec(o));
      const auto report = sim::run_upload(config, trace);
      std::cout << report.to_json().dump(2) << "\n";
      return report.exit_code();
    }
    if (load->parsed()) {
      const auto report = sim::load_test(config, std::chrono::duration<double>(period),
                                         std::chrono::duration<double>(duration), key_bits);
      std::cout << report.to_json().dump(2) << "\n";
      return report.succeeded == report.sent ? 0 : kExitPartial;
    }
    if (inbox->parsed()) {
      std::cout << sim::fetch_inbox(config).dump(2) << "\n";
      return 0;
    }
  } catch (const sim::ClientConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return 0;
}
