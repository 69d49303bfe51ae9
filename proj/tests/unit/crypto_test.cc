#include "idsign/crypto.h"

#include <openssl/evp.h>

#include <random>

#include <gtest/gtest.h>

#include "idsign/error.h"
#include "support/testing.h"

namespace idsign {
namespace {

using testing::Hex;
using testing::Unhex;

std::string OpenSslSha256Hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  return Hex(std::string_view(reinterpret_cast<const char*>(md), len));
}

TEST(DigestTest, KnownVectors) {
  EXPECT_EQ(Digest("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Digest(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(DigestTest, AgreesWithOpenSslOnRandomInputs) {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string data(rng() % 3000, '\0');
    for (auto& c : data) c = static_cast<char>(rng());
    ASSERT_EQ(Digest(data), OpenSslSha256Hex(data));
  }
}

TEST(DigestTest, IsHexDigest) {
  EXPECT_TRUE(IsHexDigest(Digest("x")));
  EXPECT_FALSE(IsHexDigest(std::string(63, 'a')));
  EXPECT_FALSE(IsHexDigest(std::string(64, 'A')));
  EXPECT_FALSE(IsHexDigest(std::string(64, 'g')));
}

TEST(Base64UrlTest, Rfc4648Vectors) {
  EXPECT_EQ(Base64UrlEncode(std::string_view("")), "");
  EXPECT_EQ(Base64UrlEncode(std::string_view("f")), "Zg");
  EXPECT_EQ(Base64UrlEncode(std::string_view("fo")), "Zm8");
  EXPECT_EQ(Base64UrlEncode(std::string_view("foo")), "Zm9v");
  EXPECT_EQ(Base64UrlEncode(std::string_view("foobar")), "Zm9vYmFy");
  EXPECT_EQ(Base64UrlEncode(Unhex("fbff")), "-_8");
}

TEST(Base64UrlTest, RoundTripsRandomBytes) {
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    std::string data(rng() % 100, '\0');
    for (auto& c : data) c = static_cast<char>(rng());
    ASSERT_EQ(Base64UrlDecodeToString(Base64UrlEncode(data)), data);
  }
}

TEST(Base64UrlTest, RejectsNonStrictInput) {
  // Padding, whitespace, standard alphabet, impossible length, and "Zh"
  // whose final character carries non-zero trailing bits.
  for (const char* bad : {"Zg==", "Zm9v\n", "Zm+v", "Zm/v", "Z", "Zh"}) {
    SCOPED_TRACE(bad);
    try {
      Base64UrlDecode(bad);
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadEncoding);
    }
  }
}

TEST(Ed25519Test, Rfc8032TestVector1) {
  const std::string seed = Unhex(
      "9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
  const auto key = SigningKey::FromSeed(AsBytes(seed));
  EXPECT_EQ(Hex(AsChars(key.public_key().raw())),
            "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  const Bytes sig = key.Sign("");
  EXPECT_EQ(Hex(AsChars(sig)),
            "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e06522490155"
            "5fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  EXPECT_TRUE(VerifySignature(key.public_key(), "", sig));
}

TEST(Ed25519Test, RejectsAlteredMessageOrSignature) {
  const auto key = SigningKey::Generate();
  Bytes sig = key.Sign("message");
  EXPECT_TRUE(VerifySignature(key.public_key(), "message", sig));
  EXPECT_FALSE(VerifySignature(key.public_key(), "messagf", sig));
  sig[5] ^= 1;
  EXPECT_FALSE(VerifySignature(key.public_key(), "message", sig));
  EXPECT_FALSE(VerifySignature(key.public_key(), "message",
                               ByteView(sig.data(), 63)));
}

TEST(Ed25519Test, SeedRoundTrip) {
  const auto key = SigningKey::Generate();
  const auto again = SigningKey::FromSeedBase64Url(key.SeedBase64Url());
  EXPECT_EQ(again.public_key(), key.public_key());
  EXPECT_THROW(SigningKey::FromSeedBase64Url("AAAA"), Error);
}

TEST(PublicKeyTest, Base64UrlRoundTrip) {
  const auto key = SigningKey::Generate().public_key();
  EXPECT_EQ(PublicKey::FromBase64Url(key.ToBase64Url()), key);
  try {
    PublicKey::FromBase64Url("AAAA");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidKey);
  }
}

TEST(ConstantTimeEqualsTest, Basics) {
  EXPECT_TRUE(ConstantTimeEquals("abc", "abc"));
  EXPECT_FALSE(ConstantTimeEquals("abc", "abd"));
  EXPECT_FALSE(ConstantTimeEquals("abc", "ab"));
}

TEST(RandomBytesTest, LengthAndVariation) {
  EXPECT_EQ(RandomBytes(16).size(), 16u);
  EXPECT_NE(RandomBytes(16), RandomBytes(16));
}

}  // namespace
}  // namespace idsign
