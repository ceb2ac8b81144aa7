#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Forward declaration keeps OpenSSL headers out of public includes.
typedef struct evp_pkey_st EVP_PKEY;

namespace mobility::crypto {

class CryptoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The only message ever reported for a failed decryption, whatever the
/// cause (wrong key, corrupted ciphertext, bad padding).
inline constexpr std::string_view kDecryptionFailed = "decryption failed";

[[nodiscard]] bool is_supported_key_size(int bits) noexcept;

/// Largest plaintext one PKCS#1 v1.5 block can carry.
[[nodiscard]] constexpr std::size_t max_plaintext_bytes(int modulus_bits) noexcept {
  return static_cast<std::size_t>(modulus_bits / 8 - 11);
}

namespace detail {
using PkeyPtr = std::shared_ptr<EVP_PKEY>;
}  // namespace detail

/// RSA public key parsed from DER SubjectPublicKeyInfo.
class PublicKey {
 public:
  /// Throws CryptoError if the bytes are not an RSA SubjectPublicKeyInfo.
  static PublicKey from_der(std::span<const std::uint8_t> der);

  [[nodiscard]] int modulus_bits() const noexcept { return bits_; }
  [[nodiscard]] const std::vector<std::uint8_t>& der() const noexcept { return der_; }
  [[nodiscard]] EVP_PKEY* native() const noexcept { return key_.get(); }

 private:
  PublicKey(detail::PkeyPtr key, std::vector<std::uint8_t> der, int bits)
      : key_(std::move(key)), der_(std::move(der)), bits_(bits) {}
  detail::PkeyPtr key_;
  std::vector<std::uint8_t> der_;
  int bits_;
};

/// Server RSA keypair. Immutable once created; copies share the key.
class KeyPair {
 public:
  /// Fresh keypair of 2048 or 4096 bits; anything else throws
  /// CryptoError("unsupported key size").
  static KeyPair generate(int bits);
  static KeyPair from_private_pem(std::string_view pem);
  static KeyPair load_private_pem(const std::filesystem::path& path);

  [[nodiscard]] int modulus_bits() const noexcept { return bits_; }
  [[nodiscard]] const std::vector<std::uint8_t>& public_der() const noexcept { return public_der_; }
  [[nodiscard]] PublicKey public_key() const { return PublicKey::from_der(public_der_); }
  [[nodiscard]] std::string private_pem() const;

  /// Writes "private.pem" (mode 0600) and "public.der" into `dir`.
  void save(const std::filesystem::path& dir) const;

  [[nodiscard]] EVP_PKEY* native() const noexcept { return key_.get(); }

 private:
  explicit KeyPair(detail::PkeyPtr key);
  detail::PkeyPtr key_;
  std::vector<std::uint8_t> public_der_;
  int bits_ = 0;
};

/// Hex text of one RSA ciphertext block.
struct CipherField {
  std::string hex;

  /// True when the text is hex of exactly modulus_bits/4 digits.
  [[nodiscard]] bool fits(int modulus_bits) const noexcept;
};

/// Single-block RSA/ECB/PKCS1Padding encryption, lowercase hex out.
/// Throws CryptoError("field too long for single RSA block") past the
/// padding bound.
[[nodiscard]] CipherField encrypt_field(std::span<const std::uint8_t> plaintext, const PublicKey& key);
[[nodiscard]] CipherField encrypt_field(std::span<const std::uint8_t> plaintext,
                                        std::span<const std::uint8_t> public_der);
[[nodiscard]] CipherField encrypt_field(std::string_view plaintext, const PublicKey& key);

/// Inverse of encrypt_field. A ciphertext of the wrong length is rejected
/// before any key operation; every other failure throws
/// CryptoError(kDecryptionFailed).
[[nodiscard]] std::string decrypt_field(const CipherField& c, const KeyPair& key);

}  // namespace mobility::crypto
