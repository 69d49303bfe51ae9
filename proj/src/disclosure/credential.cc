#include "idsign/disclosure/credential.h"

#include <algorithm>
#include <set>

#include "idsign/error.h"

namespace idsign::sd {

namespace {

using nlohmann::json;

void RequireFields(const json& j, std::initializer_list<const char*> fields,
                   ErrorCode code, const char* what) {
  if (!j.is_object() || j.size() != fields.size()) {
    throw Error(code, std::string(what) + ": unexpected shape");
  }
  for (const char* f : fields) {
    if (!j.contains(f)) {
      throw Error(code, std::string(what) + ": missing field " + f);
    }
  }
}

const std::string& GetString(const json& j, const char* key, ErrorCode code) {
  const json& v = j.at(key);
  if (!v.is_string()) {
    throw Error(code, std::string("field ") + key + " must be a string");
  }
  return v.get_ref<const std::string&>();
}

json CommitmentsToJson(const std::vector<ClaimCommitment>& commitments) {
  json out = json::array();
  for (const auto& c : commitments) {
    out.push_back({{"commitment", c.commitment}, {"id", c.id.Render()}});
  }
  return out;
}

bool IsValidSalt(std::string_view salt) {
  try {
    return Base64UrlDecode(salt).size() == kSaltSize;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::string ComputeCommitment(std::string_view salt_b64u, const AttributeId& id,
                              std::string_view value) {
  const json tuple = json::array(
      {"v1", std::string(salt_b64u), id.Render(), std::string(value)});
  return Digest(CanonicalEncode(tuple).view());
}

CanonicalBytes Credential::SigningInput() const {
  return CanonicalEncode({{"v", 1},
                          {"issuer_id", issuer_id},
                          {"commitments", CommitmentsToJson(commitments)},
                          {"issued_at", issued_at.ToString()},
                          {"expires_at", expires_at.ToString()}});
}

bool Credential::Has(const AttributeId& id) const {
  return Find(id) != nullptr;
}

const ClaimCommitment* Credential::Find(const AttributeId& id) const {
  for (const auto& c : commitments) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

json Credential::ToJson() const {
  return {{"v", 1},
          {"issuer_id", issuer_id},
          {"commitments", CommitmentsToJson(commitments)},
          {"issued_at", issued_at.ToString()},
          {"expires_at", expires_at.ToString()},
          {"issuer_sig", Base64UrlEncode(ByteView(issuer_sig))}};
}

Credential Credential::FromJson(const json& j) {
  constexpr auto kCode = ErrorCode::kMalformedCredential;
  RequireFields(j,
                {"v", "issuer_id", "commitments", "issued_at", "expires_at",
                 "issuer_sig"},
                kCode, "credential");
  if (j["v"] != 1) throw Error(kCode, "unsupported credential version");
  try {
    Credential c;
    c.issuer_id = GetString(j, "issuer_id", kCode);
    if (!j["commitments"].is_array()) {
      throw Error(kCode, "commitments must be a list");
    }
    for (const auto& item : j["commitments"]) {
      RequireFields(item, {"commitment", "id"}, kCode, "commitment");
      ClaimCommitment cc{AttributeId::Parse(GetString(item, "id", kCode)),
                         GetString(item, "commitment", kCode)};
      if (!IsHexDigest(cc.commitment)) {
        throw Error(kCode, "commitment is not a hex digest");
      }
      c.commitments.push_back(std::move(cc));
    }
    c.issued_at = Timestamp::Parse(GetString(j, "issued_at", kCode));
    c.expires_at = Timestamp::Parse(GetString(j, "expires_at", kCode));
    c.issuer_sig = Base64UrlDecode(GetString(j, "issuer_sig", kCode));
    return c;
  } catch (const Error& e) {
    if (e.code() == kCode) throw;
    throw Error(kCode, e.what());
  }
}

const ClaimSecret* CredentialSecrets::Find(const AttributeId& id) const {
  for (const auto& s : claims) {
    if (s.claim.id() == id) return &s;
  }
  return nullptr;
}

json CredentialSecrets::ToJson() const {
  json out = json::array();
  for (const auto& s : claims) {
    out.push_back({{"id", s.claim.id().Render()},
                   {"salt", s.salt},
                   {"value", s.claim.value()}});
  }
  return out;
}

CredentialSecrets CredentialSecrets::FromJson(const json& j) {
  constexpr auto kCode = ErrorCode::kMalformedCredential;
  if (!j.is_array()) throw Error(kCode, "secrets must be a list");
  CredentialSecrets out;
  for (const auto& item : j) {
    RequireFields(item, {"id", "salt", "value"}, kCode, "secret");
    out.claims.push_back(
        {AttributeValue(AttributeId::Parse(GetString(item, "id", kCode)),
                        GetString(item, "value", kCode)),
         GetString(item, "salt", kCode)});
  }
  return out;
}

json Disclosure::ToJson() const {
  json revealed_json = json::array();
  for (const auto& r : revealed) {
    revealed_json.push_back(
        {{"id", r.id.Render()}, {"salt", r.salt}, {"value", r.value}});
  }
  return {{"credential", credential.ToJson()}, {"revealed", revealed_json}};
}

Disclosure Disclosure::FromJson(const json& j) {
  constexpr auto kCode = ErrorCode::kMalformedCredential;
  RequireFields(j, {"credential", "revealed"}, kCode, "disclosure");
  Disclosure d;
  d.credential = Credential::FromJson(j["credential"]);
  if (!j["revealed"].is_array()) throw Error(kCode, "revealed must be a list");
  try {
    for (const auto& item : j["revealed"]) {
      RequireFields(item, {"id", "salt", "value"}, kCode, "revealed claim");
      d.revealed.push_back({AttributeId::Parse(GetString(item, "id", kCode)),
                            GetString(item, "value", kCode),
                            GetString(item, "salt", kCode)});
    }
  } catch (const Error& e) {
    if (e.code() == kCode) throw;
    throw Error(kCode, e.what());
  }
  return d;
}

std::string Disclosure::Serialize() const {
  return CanonicalEncode(ToJson()).bytes();
}

Disclosure Disclosure::Parse(std::string_view bytes) {
  json j;
  try {
    j = ParseCanonical(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedCredential, e.what());
  }
  return FromJson(j);
}

IssuedCredential IssueCredential(const SigningKey& issuer_key,
                                 const std::string& issuer_id,
                                 std::vector<AttributeValue> claims,
                                 const Validity& validity) {
  if (claims.empty()) {
    throw Error(ErrorCode::kEmptyClaims, "a credential needs one claim");
  }
  if (!(validity.not_before < validity.not_after)) {
    throw Error(ErrorCode::kBadValidity, "issued_at must precede expires_at");
  }
  claims = SortedUnique(std::move(claims));

  IssuedCredential out;
  out.credential.issuer_id = issuer_id;
  out.credential.issued_at = validity.not_before;
  out.credential.expires_at = validity.not_after;
  for (auto& claim : claims) {
    std::string salt = Base64UrlEncode(ByteView(RandomBytes(kSaltSize)));
    out.credential.commitments.push_back(
        {claim.id(), ComputeCommitment(salt, claim.id(), claim.value())});
    out.secrets.claims.push_back({std::move(claim), std::move(salt)});
  }
  out.credential.issuer_sig =
      issuer_key.Sign(out.credential.SigningInput().view());
  return out;
}

Disclosure MakeDisclosure(const Credential& credential,
                          const CredentialSecrets& secrets,
                          const std::vector<AttributeId>& requested) {
  if (requested.empty()) {
    throw Error(ErrorCode::kEmptyRequest, "nothing requested");
  }
  std::set<AttributeId> wanted(requested.begin(), requested.end());
  Disclosure d;
  d.credential = credential;
  for (const auto& id : wanted) {
    const ClaimSecret* secret = secrets.Find(id);
    if (!credential.Has(id) || secret == nullptr) {
      throw Error(ErrorCode::kUnknownAttribute, id.Render());
    }
    d.revealed.push_back({id, secret->claim.value(), secret->salt});
  }
  return d;
}

std::vector<AttributeValue> VerifyDisclosure(const Disclosure& disclosure,
                                             const IssuerRegistry& registry,
                                             Timestamp now) {
  const Credential& cred = disclosure.credential;
  for (std::size_t i = 1; i < cred.commitments.size(); ++i) {
    if (!(cred.commitments[i - 1].id < cred.commitments[i].id)) {
      throw Error(ErrorCode::kMalformedCredential,
                  "commitments not sorted and unique");
    }
  }
  if (cred.commitments.empty()) {
    throw Error(ErrorCode::kMalformedCredential, "no commitments");
  }

  const auto issuer = registry.find(cred.issuer_id);
  if (issuer == registry.end()) {
    throw Error(ErrorCode::kUnknownIssuer, cred.issuer_id);
  }
  if (!VerifySignature(issuer->second, cred.SigningInput().view(),
                       cred.issuer_sig)) {
    throw Error(ErrorCode::kBadIssuerSignature, "issuer signature invalid");
  }
  if (now < cred.issued_at) {
    throw Error(ErrorCode::kNotYetValid, "credential not yet valid");
  }
  if (now > cred.expires_at) {
    throw Error(ErrorCode::kExpiredCredential, "credential expired");
  }

  std::vector<AttributeValue> out;
  for (std::size_t i = 0; i < disclosure.revealed.size(); ++i) {
    const RevealedClaim& r = disclosure.revealed[i];
    if (i > 0 && !(disclosure.revealed[i - 1].id < r.id)) {
      throw Error(ErrorCode::kCommitmentMismatch,
                  "revealed claims not sorted and unique");
    }
    const ClaimCommitment* c = cred.Find(r.id);
    if (c == nullptr || !IsValidSalt(r.salt)) {
      throw Error(ErrorCode::kCommitmentMismatch, r.id.Render());
    }
    std::string recomputed;
    try {
      recomputed = ComputeCommitment(r.salt, r.id, r.value);
    } catch (const Error&) {
      throw Error(ErrorCode::kCommitmentMismatch, r.id.Render());
    }
    if (recomputed != c->commitment) {
      throw Error(ErrorCode::kCommitmentMismatch, r.id.Render());
    }
    out.emplace_back(r.id, r.value);
  }
  return out;
}

void CheckSecretsConsistent(const Credential& credential,
                            const CredentialSecrets& secrets) {
  if (secrets.claims.size() != credential.commitments.size()) {
    throw Error(ErrorCode::kCommitmentMismatch,
                "secret count differs from commitment count");
  }
  for (const auto& c : credential.commitments) {
    const ClaimSecret* s = secrets.Find(c.id);
    if (s == nullptr ||
        ComputeCommitment(s->salt, c.id, s->claim.value()) != c.commitment) {
      throw Error(ErrorCode::kCommitmentMismatch, c.id.Render());
    }
  }
}

}  // namespace idsign::sd
