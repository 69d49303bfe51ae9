#ifndef IDSIGN_CRYPTO_H_
#define IDSIGN_CRYPTO_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace idsign {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView AsBytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}
inline std::string_view AsChars(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

// Lowercase hex SHA-256, 64 chars. The system-wide document/commitment hash.
std::string Digest(std::string_view data);
std::array<std::uint8_t, 32> Sha256(std::string_view data);

bool IsHexDigest(std::string_view s);

// Unpadded URL-safe base64. Decode is strict: no padding, no whitespace,
// no non-zero trailing bits. Throws Error(kBadEncoding).
std::string Base64UrlEncode(ByteView data);
std::string Base64UrlEncode(std::string_view data);
Bytes Base64UrlDecode(std::string_view text);
std::string Base64UrlDecodeToString(std::string_view text);

Bytes RandomBytes(std::size_t n);

// Compares in time independent of where the inputs differ.
bool ConstantTimeEquals(std::string_view a, std::string_view b);

inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSeedSize = 32;
inline constexpr std::size_t kSignatureSize = 64;

class PublicKey {
 public:
  PublicKey() = default;
  explicit PublicKey(const std::array<std::uint8_t, kPublicKeySize>& raw)
      : raw_(raw) {}

  // Throws Error(kInvalidKey).
  static PublicKey FromBase64Url(std::string_view text);
  std::string ToBase64Url() const;

  const std::array<std::uint8_t, kPublicKeySize>& raw() const { return raw_; }

  bool operator==(const PublicKey&) const = default;

 private:
  std::array<std::uint8_t, kPublicKeySize> raw_{};
};

// Ed25519 signing key. The secret half is wiped on destruction.
class SigningKey {
 public:
  static SigningKey Generate();
  // Deterministic keypair from a 32-byte seed. Throws Error(kInvalidKey).
  static SigningKey FromSeed(ByteView seed);
  static SigningKey FromSeedBase64Url(std::string_view seed);

  SigningKey(const SigningKey& other);
  SigningKey& operator=(const SigningKey& other);
  ~SigningKey();

  const PublicKey& public_key() const { return public_key_; }
  std::string SeedBase64Url() const;

  Bytes Sign(std::string_view message) const;

 private:
  SigningKey() = default;

  std::array<std::uint8_t, 64> secret_{};
  PublicKey public_key_;
};

bool VerifySignature(const PublicKey& key, std::string_view message,
                     ByteView signature);

}  // namespace idsign

#endif  // IDSIGN_CRYPTO_H_
