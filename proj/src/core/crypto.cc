#include "idsign/crypto.h"

#include <sodium.h>

#include <mutex>

#include "idsign/error.h"

namespace idsign {

namespace {

void EnsureSodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw Error(ErrorCode::kInvalidKey, "libsodium failed to initialize");
    }
  });
}

}  // namespace

std::array<std::uint8_t, 32> Sha256(std::string_view data) {
  std::array<std::uint8_t, 32> out;
  crypto_hash_sha256(out.data(),
                     reinterpret_cast<const unsigned char*>(data.data()),
                     data.size());
  return out;
}

std::string Digest(std::string_view data) {
  const auto hash = Sha256(data);
  char hex[65];
  sodium_bin2hex(hex, sizeof hex, hash.data(), hash.size());
  return std::string(hex, 64);
}

bool IsHexDigest(std::string_view s) {
  if (s.size() != 64) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::string Base64UrlEncode(ByteView data) {
  constexpr int kVariant = sodium_base64_VARIANT_URLSAFE_NO_PADDING;
  std::string out(sodium_base64_ENCODED_LEN(data.size(), kVariant), '\0');
  sodium_bin2base64(out.data(), out.size(), data.data(), data.size(),
                    kVariant);
  out.resize(out.size() - 1);  // trailing NUL
  return out;
}

std::string Base64UrlEncode(std::string_view data) {
  return Base64UrlEncode(AsBytes(data));
}

Bytes Base64UrlDecode(std::string_view text) {
  Bytes out(text.size() * 3 / 4 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(),
                        nullptr, &len, &end,
                        sodium_base64_VARIANT_URLSAFE_NO_PADDING) != 0 ||
      end != text.data() + text.size()) {
    throw Error(ErrorCode::kBadEncoding, "invalid base64url");
  }
  out.resize(len);
  return out;
}

std::string Base64UrlDecodeToString(std::string_view text) {
  const Bytes b = Base64UrlDecode(text);
  return std::string(b.begin(), b.end());
}

Bytes RandomBytes(std::size_t n) {
  EnsureSodium();
  Bytes out(n);
  randombytes_buf(out.data(), n);
  return out;
}

bool ConstantTimeEquals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

PublicKey PublicKey::FromBase64Url(std::string_view text) {
  Bytes raw;
  try {
    raw = Base64UrlDecode(text);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidKey, "public key is not base64url");
  }
  if (raw.size() != kPublicKeySize) {
    throw Error(ErrorCode::kInvalidKey, "public key must be 32 bytes");
  }
  std::array<std::uint8_t, kPublicKeySize> arr;
  std::copy(raw.begin(), raw.end(), arr.begin());
  return PublicKey(arr);
}

std::string PublicKey::ToBase64Url() const {
  return Base64UrlEncode(ByteView(raw_));
}

SigningKey SigningKey::Generate() {
  const Bytes seed = RandomBytes(kSeedSize);
  return FromSeed(seed);
}

SigningKey SigningKey::FromSeed(ByteView seed) {
  EnsureSodium();
  if (seed.size() != kSeedSize) {
    throw Error(ErrorCode::kInvalidKey, "seed must be 32 bytes");
  }
  SigningKey key;
  std::array<std::uint8_t, kPublicKeySize> pk;
  crypto_sign_ed25519_seed_keypair(pk.data(), key.secret_.data(), seed.data());
  key.public_key_ = PublicKey(pk);
  return key;
}

SigningKey SigningKey::FromSeedBase64Url(std::string_view seed) {
  Bytes raw;
  try {
    raw = Base64UrlDecode(seed);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidKey, "seed is not base64url");
  }
  SigningKey key = FromSeed(raw);
  sodium_memzero(raw.data(), raw.size());
  return key;
}

SigningKey::SigningKey(const SigningKey& other)
    : secret_(other.secret_), public_key_(other.public_key_) {}

SigningKey& SigningKey::operator=(const SigningKey& other) {
  secret_ = other.secret_;
  public_key_ = other.public_key_;
  return *this;
}

SigningKey::~SigningKey() { sodium_memzero(secret_.data(), secret_.size()); }

std::string SigningKey::SeedBase64Url() const {
  std::array<std::uint8_t, kSeedSize> seed;
  crypto_sign_ed25519_sk_to_seed(seed.data(), secret_.data());
  std::string out = Base64UrlEncode(ByteView(seed));
  sodium_memzero(seed.data(), seed.size());
  return out;
}

Bytes SigningKey::Sign(std::string_view message) const {
  Bytes sig(kSignatureSize);
  crypto_sign_ed25519_detached(
      sig.data(), nullptr, reinterpret_cast<const unsigned char*>(message.data()),
      message.size(), secret_.data());
  return sig;
}

bool VerifySignature(const PublicKey& key, std::string_view message,
                     ByteView signature) {
  EnsureSodium();
  if (signature.size() != kSignatureSize) return false;
  return crypto_sign_ed25519_verify_detached(
             signature.data(),
             reinterpret_cast<const unsigned char*>(message.data()),
             message.size(), key.raw().data()) == 0;
}

}  // namespace idsign
