#pragma once

// Minimal DER reader used as an independent check on exported public keys.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace testing_support {

struct RsaPublicInfo {
  std::string algorithm_oid;
  int modulus_bits = 0;
  std::uint64_t exponent = 0;
};

class DerCursor {
 public:
  explicit DerCursor(std::span<const std::uint8_t> b) : bytes_(b) {}

  // Reads one TLV with the expected tag and returns its value.
  std::optional<std::span<const std::uint8_t>> read(std::uint8_t tag) {
    if (pos_ + 2 > bytes_.size() || bytes_[pos_] != tag) return std::nullopt;
    std::size_t i = pos_ + 1;
    std::size_t len = bytes_[i++];
    if (len & 0x80) {
      const std::size_t n = len & 0x7f;
      if (n == 0 || n > 4 || i + n > bytes_.size()) return std::nullopt;
      len = 0;
      for (std::size_t k = 0; k < n; ++k) len = len << 8 | bytes_[i++];
    }
    if (i + len > bytes_.size()) return std::nullopt;
    pos_ = i + len;
    return bytes_.subspan(i, len);
  }

  [[nodiscard]] bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline std::string decode_oid(std::span<const std::uint8_t> v) {
  if (v.empty()) return {};
  std::string out = std::to_string(v[0] / 40) + "." + std::to_string(v[0] % 40);
  std::uint64_t acc = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    acc = acc << 7 | (v[i] & 0x7f);
    if (!(v[i] & 0x80)) {
      out += "." + std::to_string(acc);
      acc = 0;
    }
  }
  return out;
}

inline std::optional<RsaPublicInfo> parse_rsa_spki(std::span<const std::uint8_t> der) {
  DerCursor top(der);
  auto spki = top.read(0x30);
  if (!spki || !top.at_end()) return std::nullopt;
  DerCursor s(*spki);
  auto alg = s.read(0x30);
  auto bits = s.read(0x03);
  if (!alg || !bits || !s.at_end() || bits->empty() || (*bits)[0] != 0) return std::nullopt;
  DerCursor a(*alg);
  auto oid = a.read(0x06);
  if (!oid) return std::nullopt;
  DerCursor k(bits->subspan(1));
  auto rsa = k.read(0x30);
  if (!rsa) return std::nullopt;
  DerCursor r(*rsa);
  auto n = r.read(0x02);
  auto e = r.read(0x02);
  if (!n || !e || !r.at_end()) return std::nullopt;

  auto mod = *n;
  while (!mod.empty() && mod[0] == 0) mod = mod.subspan(1);
  if (mod.empty()) return std::nullopt;
  int top_bits = 0;
  for (auto v = mod[0]; v; v >>= 1) ++top_bits;
  RsaPublicInfo info;
  info.algorithm_oid = decode_oid(*oid);
  info.modulus_bits = static_cast<int>((mod.size() - 1) * 8) + top_bits;
  for (auto b : *e) info.exponent = info.exponent << 8 | b;
  return info;
}

}  // namespace testing_support
