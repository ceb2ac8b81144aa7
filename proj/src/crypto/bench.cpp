#include "mobility/crypto/bench.hpp"

#include <sys/resource.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace mobility::crypto {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_of(const timeval& tv) { return static_cast<double>(tv.tv_sec) + tv.tv_usec / 1e6; }

template <typename Pace>
BenchReport run(const KeyPair& key, std::size_t count, Pace&& wait_for_slot) {
  BenchReport r;
  r.modulus_bits = key.modulus_bits();
  if (count == 0) return r;

  // "Each character is decrypted": a one-character field per request.
  const auto field = encrypt_field(std::string_view("a"), key.public_key());
  r.latencies_s.reserve(count);
  const double cpu0 = process_cpu_seconds();
  for (std::size_t i = 0; i < count; ++i) {
    wait_for_slot(i, r);
    const auto t0 = Clock::now();
    (void)decrypt_field(field, key);
    r.latencies_s.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    ++r.ops_completed;
  }
  r.cpu_time_s = process_cpu_seconds() - cpu0;
  r.mean_latency_s = std::accumulate(r.latencies_s.begin(), r.latencies_s.end(), 0.0) / r.latencies_s.size();
  return r;
}

}  // namespace

double process_cpu_seconds() noexcept {
  rusage ru{};
  if (getrusage(RUSAGE_SELF, &ru) != 0) return 0.0;
  return seconds_of(ru.ru_utime) + seconds_of(ru.ru_stime);
}

BenchReport bench_decrypt(const KeyPair& key, std::chrono::duration<double> duration,
                          std::chrono::duration<double> period) {
  if (period.count() <= 0.0) throw std::invalid_argument("bench period must be positive");
  if (duration.count() <= 0.0) return BenchReport{key.modulus_bits()};
  // small epsilon so 60 s / 1 s yields 60, not 59, after rounding
  const auto count = static_cast<std::size_t>(std::floor(duration.count() / period.count() + 1e-9));
  const auto start = Clock::now();
  return run(key, count, [&](std::size_t i, BenchReport& r) {
    const auto slot = start + std::chrono::duration_cast<Clock::duration>(period * static_cast<double>(i));
    if (i > 0 && Clock::now() > slot) ++r.ops_late;
    std::this_thread::sleep_until(slot);
  });
}

BenchReport time_decrypts(const KeyPair& key, std::size_t count) {
  return run(key, count, [](std::size_t, BenchReport&) {});
}

}  // namespace mobility::crypto
