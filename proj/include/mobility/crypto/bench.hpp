#pragma once

#include <chrono>
#include <cstddef>
#include <vector>

#include "mobility/crypto/rsa_envelope.hpp"

namespace mobility::crypto {

struct BenchReport {
  int modulus_bits = 0;
  std::size_t ops_completed = 0;
  std::size_t ops_late = 0;  // decrypts that overran their slot
  double mean_latency_s = 0.0;
  double cpu_time_s = 0.0;
  std::vector<double> latencies_s;

  [[nodiscard]] bool empty() const noexcept { return ops_completed == 0; }
};

/// Process CPU time (user + system) in seconds.
[[nodiscard]] double process_cpu_seconds() noexcept;

/// Decrypts one ciphertext per `period` for `duration`, i.e.
/// floor(duration / period) decrypts on a fixed schedule.
/// Throws std::invalid_argument for a non-positive period.
[[nodiscard]] BenchReport bench_decrypt(const KeyPair& key, std::chrono::duration<double> duration,
                                        std::chrono::duration<double> period);

/// `count` back-to-back decrypts with no pacing.
[[nodiscard]] BenchReport time_decrypts(const KeyPair& key, std::size_t count);

}  // namespace mobility::crypto
