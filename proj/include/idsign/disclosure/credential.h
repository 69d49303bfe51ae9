#ifndef IDSIGN_DISCLOSURE_CREDENTIAL_H_
#define IDSIGN_DISCLOSURE_CREDENTIAL_H_

#include <map>
#include <string>
#include <vector>

#include "idsign/attribute.h"
#include "idsign/canonical.h"
#include "idsign/crypto.h"
#include "idsign/timestamp.h"
#include "json.hpp"

// Salted-digest selective disclosure. An issuer signs a list of per-claim
// commitments; the holder keeps the salts and values and later reveals any
// subset. A verifier recomputes the revealed commitments and checks the
// issuer signature over the full list, learning nothing about the rest
// beyond their count and ids.
//
// Weaker than a zero-knowledge scheme: the commitment list and issuer
// signature are identical across disclosures, so two disclosures of the same
// credential are linkable.
namespace idsign::sd {

inline constexpr std::size_t kSaltSize = 16;

struct ClaimCommitment {
  AttributeId id;
  std::string commitment;  // 64 lowercase hex chars

  bool operator==(const ClaimCommitment&) const = default;
};

struct Credential {
  std::string issuer_id;
  std::vector<ClaimCommitment> commitments;  // sorted by id, unique
  Timestamp issued_at;
  Timestamp expires_at;
  Bytes issuer_sig;

  // canonical_encode({v:1, issuer_id, commitments, issued_at, expires_at})
  CanonicalBytes SigningInput() const;

  bool Has(const AttributeId& id) const;
  const ClaimCommitment* Find(const AttributeId& id) const;

  nlohmann::json ToJson() const;
  // Strict: unknown or missing fields throw Error(kMalformedCredential).
  static Credential FromJson(const nlohmann::json& j);

  bool operator==(const Credential&) const = default;
};

struct ClaimSecret {
  AttributeValue claim;
  std::string salt;  // base64url of kSaltSize bytes

  bool operator==(const ClaimSecret&) const = default;
};

struct CredentialSecrets {
  std::vector<ClaimSecret> claims;  // sorted by id, one per commitment

  const ClaimSecret* Find(const AttributeId& id) const;

  nlohmann::json ToJson() const;
  static CredentialSecrets FromJson(const nlohmann::json& j);

  bool operator==(const CredentialSecrets&) const = default;
};

struct RevealedClaim {
  AttributeId id;
  std::string value;
  std::string salt;

  bool operator==(const RevealedClaim&) const = default;
};

struct Disclosure {
  Credential credential;
  std::vector<RevealedClaim> revealed;  // sorted by id

  nlohmann::json ToJson() const;
  static Disclosure FromJson(const nlohmann::json& j);

  // Canonical JSON bytes; Parse accepts only exactly this form.
  std::string Serialize() const;
  static Disclosure Parse(std::string_view bytes);

  bool operator==(const Disclosure&) const = default;
};

struct Validity {
  Timestamp not_before;
  Timestamp not_after;
};

struct IssuedCredential {
  Credential credential;
  CredentialSecrets secrets;
};

using IssuerRegistry = std::map<std::string, PublicKey>;

// digest(canonical_encode(["v1", salt, id, value]))
std::string ComputeCommitment(std::string_view salt_b64u, const AttributeId& id,
                              std::string_view value);

// Throws kEmptyClaims, kDuplicateAttribute, kBadValidity.
IssuedCredential IssueCredential(const SigningKey& issuer_key,
                                 const std::string& issuer_id,
                                 std::vector<AttributeValue> claims,
                                 const Validity& validity);

// Throws kEmptyRequest, kUnknownAttribute.
Disclosure MakeDisclosure(const Credential& credential,
                          const CredentialSecrets& secrets,
                          const std::vector<AttributeId>& requested);

// Returns the revealed attributes when the disclosure is issuer-backed and
// current. Throws kUnknownIssuer, kBadIssuerSignature, kNotYetValid,
// kExpiredCredential, kCommitmentMismatch, kMalformedCredential.
std::vector<AttributeValue> VerifyDisclosure(const Disclosure& disclosure,
                                             const IssuerRegistry& registry,
                                             Timestamp now);

// Throws kCommitmentMismatch when the secrets do not reproduce every
// commitment of |credential| one-to-one.
void CheckSecretsConsistent(const Credential& credential,
                            const CredentialSecrets& secrets);

}  // namespace idsign::sd

#endif  // IDSIGN_DISCLOSURE_CREDENTIAL_H_
