#ifndef IDSIGN_SIGNATURE_ENGINE_H_
#define IDSIGN_SIGNATURE_ENGINE_H_

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idsign/attribute.h"
#include "idsign/canonical.h"
#include "idsign/crypto.h"
#include "idsign/timestamp.h"
#include "json.hpp"

// Binding of verified attributes to a document.
//
// The key server, after verifying a wallet disclosure, issues a short-lived
// AttributeCertificate that binds the disclosed attributes to an ephemeral
// signer public key. The signer then signs the document hash with the
// matching private key. A verifier needs only the key server's public key.
namespace idsign::sig {

inline constexpr std::chrono::seconds kCertificateLifetime{300};
inline constexpr std::chrono::seconds kMaxCertificateWindow{600};
inline constexpr std::chrono::seconds kDefaultClockSkew{60};

inline constexpr char kDefaultVerifyHint[] =
    "Verify at http://127.0.0.1:8470/ or run: idsign verify <file>";

struct AttributeCertificate {
  std::string server_id;
  std::string signer_pubkey;  // base64url
  std::vector<AttributeValue> attributes;  // sorted by id, non-empty
  std::string session_id;
  Timestamp issued_at;
  Timestamp expires_at;
  Bytes server_sig;

  // canonical_encode of every field except server_sig, plus v:1.
  CanonicalBytes SigningInput() const;

  nlohmann::json ToJson() const;
  // Throws Error(kMalformedPayload).
  static AttributeCertificate FromJson(const nlohmann::json& j);

  bool operator==(const AttributeCertificate&) const = default;
};

struct SignaturePayload {
  std::string doc_hash;
  std::uint64_t original_length = 0;
  std::vector<AttributeValue> attributes;
  Timestamp signed_at;
  std::string signer_pubkey;
  Bytes signer_sig;
  AttributeCertificate cert;
  std::string verify_hint;

  nlohmann::json ToJson() const;
  static SignaturePayload FromJson(const nlohmann::json& j);

  // The bit-exact embedded form (canonical JSON).
  std::string Serialize() const;
  // Accepts only canonical bytes. Throws Error(kMalformedPayload).
  static SignaturePayload Parse(std::string_view bytes);

  bool operator==(const SignaturePayload&) const = default;
};

enum class VerificationStatus {
  kIntactSignature,
  kNoSignature,
  kInvalidSignature,
};

std::string_view StatusName(VerificationStatus status);

namespace warning {
// Bytes after the signed range (the banner update) are not covered by the
// signature.
inline constexpr char kUnsignedOverlayPresent[] = "UNSIGNED_OVERLAY_PRESENT";
// Attached to every intact report: integrity says nothing about whether the
// signer is the party that should have signed.
inline constexpr char kCheckSignerRelevance[] = "CHECK_SIGNER_RELEVANCE";
}  // namespace warning

struct VerificationReport {
  VerificationStatus status = VerificationStatus::kNoSignature;
  std::vector<AttributeValue> signer_attributes;  // empty unless intact
  std::optional<Timestamp> signed_at;
  std::vector<std::string> warnings;
  std::optional<std::string> failure_reason;

  static VerificationReport Intact(std::vector<AttributeValue> attributes,
                                   Timestamp signed_at);
  static VerificationReport Invalid(std::string reason);
  static VerificationReport NoSignature();

  bool intact() const { return status == VerificationStatus::kIntactSignature; }
  bool HasWarning(std::string_view code) const;
  void AddWarning(std::string code);

  // {status, signer_attributes, signed_at, warnings, failure_reason}; every
  // key is always present (null when absent).
  nlohmann::json ToJson() const;
};

using TrustRoots = std::map<std::string, PublicKey>;

struct VerifyPolicy {
  std::chrono::seconds clock_skew = kDefaultClockSkew;
  // When set, signatures dated later than now + clock_skew are rejected.
  std::optional<Timestamp> now;
};

// canonical_encode({v:1, doc_hash, original_length, attributes, signed_at,
// verify_hint}). Attributes are sorted here. Throws kEmptyAttributes.
CanonicalBytes BuildTbs(std::string_view doc_hash,
                        std::uint64_t original_length,
                        std::vector<AttributeValue> attributes,
                        Timestamp signed_at, std::string_view verify_hint);

// Validity window [now, now + kCertificateLifetime]. Throws kEmptyAttributes.
AttributeCertificate IssueCertificate(const SigningKey& server_key,
                                      const std::string& server_id,
                                      const PublicKey& signer_pubkey,
                                      std::vector<AttributeValue> attributes,
                                      const std::string& session_id,
                                      Timestamp now);

// Throws kCertificateWindowViolation, kKeyMismatch.
SignaturePayload SignDocument(const SigningKey& signer_key,
                              const std::string& doc_hash,
                              std::uint64_t original_length,
                              const AttributeCertificate& cert,
                              Timestamp signed_at,
                              const std::string& verify_hint =
                                  kDefaultVerifyHint);

// Never throws on malformed content; every failure is an invalid report
// carrying the first failing check.
VerificationReport VerifyPayload(const SignaturePayload& payload,
                                 const TrustRoots& trust_roots,
                                 std::string_view expected_doc_hash,
                                 const VerifyPolicy& policy = {});

// First 8 hex chars of digest(payload serialization); printed by `sign` as
// a completion code.
std::string SuccessCode(const SignaturePayload& payload);

}  // namespace idsign::sig

#endif  // IDSIGN_SIGNATURE_ENGINE_H_
