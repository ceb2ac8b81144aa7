#include "mobility/crypto/rsa_envelope.hpp"

#include <fcntl.h>
#include <openssl/bio.h>
#include <openssl/core_names.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/params.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>
#include <sys/stat.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "mobility/crypto/hex.hpp"

namespace mobility::crypto {

namespace {

struct CtxDeleter {
  void operator()(EVP_PKEY_CTX* c) const noexcept { EVP_PKEY_CTX_free(c); }
};
using CtxPtr = std::unique_ptr<EVP_PKEY_CTX, CtxDeleter>;

struct BioDeleter {
  void operator()(BIO* b) const noexcept { BIO_free(b); }
};
using BioPtr = std::unique_ptr<BIO, BioDeleter>;

detail::PkeyPtr adopt(EVP_PKEY* k) { return detail::PkeyPtr(k, [](EVP_PKEY* p) { EVP_PKEY_free(p); }); }

[[noreturn]] void fail(const std::string& what) {
  ERR_clear_error();
  throw CryptoError(what);
}

std::vector<std::uint8_t> export_public_der(EVP_PKEY* key) {
  const int len = i2d_PUBKEY(key, nullptr);
  if (len <= 0) fail("cannot export public key");
  std::vector<std::uint8_t> der(static_cast<std::size_t>(len));
  auto* p = der.data();
  if (i2d_PUBKEY(key, &p) != len) fail("cannot export public key");
  return der;
}

void write_file(const std::filesystem::path& path, std::string_view data, mode_t mode) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, mode);
  if (fd < 0) throw CryptoError("cannot write " + path.string());
  ::fchmod(fd, mode);
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n = ::write(fd, data.data() + off, data.size() - off);
    if (n <= 0) {
      ::close(fd);
      throw CryptoError("cannot write " + path.string());
    }
    off += static_cast<std::size_t>(n);
  }
  ::close(fd);
}

}  // namespace

bool is_supported_key_size(int bits) noexcept { return bits == 2048 || bits == 4096; }

PublicKey PublicKey::from_der(std::span<const std::uint8_t> der) {
  const unsigned char* p = der.data();
  EVP_PKEY* raw = d2i_PUBKEY(nullptr, &p, static_cast<long>(der.size()));
  if (raw == nullptr) fail("not a DER public key");
  auto key = adopt(raw);
  if (EVP_PKEY_get_base_id(raw) != EVP_PKEY_RSA) fail("public key is not RSA");
  if (p != der.data() + der.size()) fail("trailing bytes after public key");
  return PublicKey(std::move(key), std::vector<std::uint8_t>(der.begin(), der.end()), EVP_PKEY_get_bits(raw));
}

KeyPair::KeyPair(detail::PkeyPtr key) : key_(std::move(key)) {
  public_der_ = export_public_der(key_.get());
  bits_ = EVP_PKEY_get_bits(key_.get());
}

KeyPair KeyPair::generate(int bits) {
  if (!is_supported_key_size(bits)) throw CryptoError("unsupported key size");
  CtxPtr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_RSA, nullptr));
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) <= 0 || EVP_PKEY_CTX_set_rsa_keygen_bits(ctx.get(), bits) <= 0) {
    fail("key generation setup failed");
  }
  EVP_PKEY* raw = nullptr;
  if (EVP_PKEY_keygen(ctx.get(), &raw) <= 0) fail("key generation failed");
  return KeyPair(adopt(raw));
}

KeyPair KeyPair::from_private_pem(std::string_view pem) {
  BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
  if (!bio) fail("out of memory");
  EVP_PKEY* raw = PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr);
  if (raw == nullptr) fail("not a PEM private key");
  auto key = adopt(raw);
  if (EVP_PKEY_get_base_id(raw) != EVP_PKEY_RSA) fail("private key is not RSA");
  if (!is_supported_key_size(EVP_PKEY_get_bits(raw))) fail("unsupported key size");
  return KeyPair(std::move(key));
}

KeyPair KeyPair::load_private_pem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CryptoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return from_private_pem(os.str());
}

std::string KeyPair::private_pem() const {
  BioPtr bio(BIO_new(BIO_s_mem()));
  if (!bio || PEM_write_bio_PrivateKey(bio.get(), key_.get(), nullptr, nullptr, 0, nullptr, nullptr) != 1) {
    fail("cannot serialize private key");
  }
  char* data = nullptr;
  const long len = BIO_get_mem_data(bio.get(), &data);
  return std::string(data, static_cast<std::size_t>(len));
}

void KeyPair::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_file(dir / "private.pem", private_pem(), 0600);
  write_file(dir / "public.der",
             std::string_view(reinterpret_cast<const char*>(public_der_.data()), public_der_.size()), 0644);
}

bool CipherField::fits(int modulus_bits) const noexcept {
  return hex.size() == static_cast<std::size_t>(modulus_bits / 4) && is_hex(hex);
}

CipherField encrypt_field(std::span<const std::uint8_t> plaintext, const PublicKey& key) {
  if (plaintext.size() > max_plaintext_bytes(key.modulus_bits())) {
    throw CryptoError("field too long for single RSA block");
  }
  CtxPtr ctx(EVP_PKEY_CTX_new(key.native(), nullptr));
  if (!ctx || EVP_PKEY_encrypt_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_PADDING) <= 0) {
    fail("encryption setup failed");
  }
  std::size_t out_len = 0;
  if (EVP_PKEY_encrypt(ctx.get(), nullptr, &out_len, plaintext.data(), plaintext.size()) <= 0) {
    fail("encryption failed");
  }
  std::vector<std::uint8_t> out(out_len);
  if (EVP_PKEY_encrypt(ctx.get(), out.data(), &out_len, plaintext.data(), plaintext.size()) <= 0) {
    fail("encryption failed");
  }
  out.resize(out_len);
  return {to_hex(out)};
}

CipherField encrypt_field(std::span<const std::uint8_t> plaintext, std::span<const std::uint8_t> public_der) {
  return encrypt_field(plaintext, PublicKey::from_der(public_der));
}

CipherField encrypt_field(std::string_view plaintext, const PublicKey& key) {
  return encrypt_field(std::span(reinterpret_cast<const std::uint8_t*>(plaintext.data()), plaintext.size()), key);
}

std::string decrypt_field(const CipherField& c, const KeyPair& key) {
  if (c.hex.size() != static_cast<std::size_t>(key.modulus_bits() / 4)) {
    throw CryptoError("ciphertext length does not match key size");
  }
  std::vector<std::uint8_t> cipher;
  try {
    cipher = from_hex(c.hex);
  } catch (const std::invalid_argument&) {
    throw CryptoError("ciphertext is not hex");
  }
  CtxPtr ctx(EVP_PKEY_CTX_new(key.native(), nullptr));
  if (!ctx || EVP_PKEY_decrypt_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_PADDING) <= 0) {
    fail(std::string(kDecryptionFailed));
  }
#ifdef OSSL_ASYM_CIPHER_PARAM_IMPLICIT_REJECTION
  // Implicit rejection would turn a bad block into random plaintext; the
  // envelope contract needs an explicit failure instead.
  unsigned int implicit = 0;
  OSSL_PARAM params[] = {OSSL_PARAM_construct_uint(OSSL_ASYM_CIPHER_PARAM_IMPLICIT_REJECTION, &implicit),
                         OSSL_PARAM_construct_end()};
  if (EVP_PKEY_CTX_set_params(ctx.get(), params) <= 0) fail(std::string(kDecryptionFailed));
#endif
  std::size_t out_len = 0;
  if (EVP_PKEY_decrypt(ctx.get(), nullptr, &out_len, cipher.data(), cipher.size()) <= 0) {
    fail(std::string(kDecryptionFailed));
  }
  std::string out(out_len, '\0');
  if (EVP_PKEY_decrypt(ctx.get(), reinterpret_cast<unsigned char*>(out.data()), &out_len, cipher.data(),
                       cipher.size()) <= 0) {
    fail(std::string(kDecryptionFailed));
  }
  out.resize(out_len);
  return out;
}

}  // namespace mobility::crypto
