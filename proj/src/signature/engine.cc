#include "idsign/signature/engine.h"

#include "idsign/error.h"

namespace idsign::sig {

namespace {

using nlohmann::json;

constexpr auto kMalformed = ErrorCode::kMalformedPayload;

void RequireFields(const json& j, std::initializer_list<const char*> fields,
                   const char* what) {
  if (!j.is_object() || j.size() != fields.size()) {
    throw Error(kMalformed, std::string(what) + ": unexpected shape");
  }
  for (const char* f : fields) {
    if (!j.contains(f)) {
      throw Error(kMalformed, std::string(what) + ": missing " + f);
    }
  }
}

std::string GetString(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_string()) {
    throw Error(kMalformed, std::string(key) + " must be a string");
  }
  return v.get<std::string>();
}

// Rethrows any lower-level parse failure as kMalformedPayload.
template <typename F>
auto AsMalformed(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == kMalformed) throw;
    throw Error(kMalformed, e.what());
  }
}

}  // namespace

std::string_view StatusName(VerificationStatus status) {
  switch (status) {
    case VerificationStatus::kIntactSignature: return "INTACT_SIGNATURE";
    case VerificationStatus::kNoSignature: return "NO_SIGNATURE";
    case VerificationStatus::kInvalidSignature: return "INVALID_SIGNATURE";
  }
  return "INVALID_SIGNATURE";
}

CanonicalBytes AttributeCertificate::SigningInput() const {
  return CanonicalEncode({{"v", 1},
                          {"server_id", server_id},
                          {"signer_pubkey", signer_pubkey},
                          {"attributes", AttributesToJson(attributes)},
                          {"session_id", session_id},
                          {"issued_at", issued_at.ToString()},
                          {"expires_at", expires_at.ToString()}});
}

json AttributeCertificate::ToJson() const {
  return {{"v", 1},
          {"server_id", server_id},
          {"signer_pubkey", signer_pubkey},
          {"attributes", AttributesToJson(attributes)},
          {"session_id", session_id},
          {"issued_at", issued_at.ToString()},
          {"expires_at", expires_at.ToString()},
          {"server_sig", Base64UrlEncode(ByteView(server_sig))}};
}

AttributeCertificate AttributeCertificate::FromJson(const json& j) {
  RequireFields(j,
                {"v", "server_id", "signer_pubkey", "attributes", "session_id",
                 "issued_at", "expires_at", "server_sig"},
                "certificate");
  if (j["v"] != 1) throw Error(kMalformed, "unsupported certificate version");
  return AsMalformed([&] {
    AttributeCertificate c;
    c.server_id = GetString(j, "server_id");
    c.signer_pubkey = GetString(j, "signer_pubkey");
    c.attributes = AttributesFromJson(j["attributes"]);
    c.session_id = GetString(j, "session_id");
    c.issued_at = Timestamp::Parse(GetString(j, "issued_at"));
    c.expires_at = Timestamp::Parse(GetString(j, "expires_at"));
    c.server_sig = Base64UrlDecode(GetString(j, "server_sig"));
    return c;
  });
}

json SignaturePayload::ToJson() const {
  return {{"v", 1},
          {"doc_hash", doc_hash},
          {"original_length", original_length},
          {"attributes", AttributesToJson(attributes)},
          {"signed_at", signed_at.ToString()},
          {"signer_pubkey", signer_pubkey},
          {"signer_sig", Base64UrlEncode(ByteView(signer_sig))},
          {"cert", cert.ToJson()},
          {"verify_hint", verify_hint}};
}

SignaturePayload SignaturePayload::FromJson(const json& j) {
  RequireFields(j,
                {"v", "doc_hash", "original_length", "attributes", "signed_at",
                 "signer_pubkey", "signer_sig", "cert", "verify_hint"},
                "payload");
  if (j["v"] != 1) throw Error(kMalformed, "unsupported payload version");
  if (!j["original_length"].is_number_unsigned()) {
    throw Error(kMalformed, "original_length must be a non-negative integer");
  }
  return AsMalformed([&] {
    SignaturePayload p;
    p.doc_hash = GetString(j, "doc_hash");
    p.original_length = j["original_length"].get<std::uint64_t>();
    p.attributes = AttributesFromJson(j["attributes"]);
    p.signed_at = Timestamp::Parse(GetString(j, "signed_at"));
    p.signer_pubkey = GetString(j, "signer_pubkey");
    p.signer_sig = Base64UrlDecode(GetString(j, "signer_sig"));
    p.cert = AttributeCertificate::FromJson(j["cert"]);
    p.verify_hint = GetString(j, "verify_hint");
    return p;
  });
}

std::string SignaturePayload::Serialize() const {
  return CanonicalEncode(ToJson()).bytes();
}

SignaturePayload SignaturePayload::Parse(std::string_view bytes) {
  return FromJson(AsMalformed([&] { return ParseCanonical(bytes); }));
}

VerificationReport VerificationReport::Intact(
    std::vector<AttributeValue> attributes, Timestamp signed_at) {
  VerificationReport r;
  r.status = VerificationStatus::kIntactSignature;
  r.signer_attributes = std::move(attributes);
  r.signed_at = signed_at;
  r.warnings.push_back(warning::kCheckSignerRelevance);
  return r;
}

VerificationReport VerificationReport::Invalid(std::string reason) {
  VerificationReport r;
  r.status = VerificationStatus::kInvalidSignature;
  r.failure_reason = std::move(reason);
  return r;
}

VerificationReport VerificationReport::NoSignature() {
  VerificationReport r;
  r.status = VerificationStatus::kNoSignature;
  r.failure_reason = "document does not contain a signature";
  return r;
}

bool VerificationReport::HasWarning(std::string_view code) const {
  for (const auto& w : warnings) {
    if (w == code) return true;
  }
  return false;
}

void VerificationReport::AddWarning(std::string code) {
  if (!HasWarning(code)) warnings.push_back(std::move(code));
}

json VerificationReport::ToJson() const {
  json out = json::object();
  out["status"] = StatusName(status);
  out["signer_attributes"] = AttributesToJson(signer_attributes);
  out["signed_at"] = signed_at ? json(signed_at->ToString()) : json(nullptr);
  out["warnings"] = warnings;
  out["failure_reason"] =
      failure_reason ? json(*failure_reason) : json(nullptr);
  return out;
}

CanonicalBytes BuildTbs(std::string_view doc_hash,
                        std::uint64_t original_length,
                        std::vector<AttributeValue> attributes,
                        Timestamp signed_at, std::string_view verify_hint) {
  if (attributes.empty()) {
    throw Error(ErrorCode::kEmptyAttributes, "nothing to sign with");
  }
  attributes = SortedUnique(std::move(attributes));
  return CanonicalEncode({{"v", 1},
                          {"doc_hash", std::string(doc_hash)},
                          {"original_length", original_length},
                          {"attributes", AttributesToJson(attributes)},
                          {"signed_at", signed_at.ToString()},
                          {"verify_hint", std::string(verify_hint)}});
}

AttributeCertificate IssueCertificate(const SigningKey& server_key,
                                      const std::string& server_id,
                                      const PublicKey& signer_pubkey,
                                      std::vector<AttributeValue> attributes,
                                      const std::string& session_id,
                                      Timestamp now) {
  if (attributes.empty()) {
    throw Error(ErrorCode::kEmptyAttributes, "certificate needs attributes");
  }
  AttributeCertificate cert;
  cert.server_id = server_id;
  cert.signer_pubkey = signer_pubkey.ToBase64Url();
  cert.attributes = SortedUnique(std::move(attributes));
  cert.session_id = session_id;
  cert.issued_at = now;
  cert.expires_at = now + kCertificateLifetime;
  cert.server_sig = server_key.Sign(cert.SigningInput().view());
  return cert;
}

SignaturePayload SignDocument(const SigningKey& signer_key,
                              const std::string& doc_hash,
                              std::uint64_t original_length,
                              const AttributeCertificate& cert,
                              Timestamp signed_at,
                              const std::string& verify_hint) {
  if (signer_key.public_key().ToBase64Url() != cert.signer_pubkey) {
    throw Error(ErrorCode::kKeyMismatch,
                "signing key does not match the certificate");
  }
  if (signed_at < cert.issued_at || signed_at > cert.expires_at) {
    throw Error(ErrorCode::kCertificateWindowViolation,
                "signing time " + signed_at.ToString() +
                    " outside certificate validity");
  }
  SignaturePayload p;
  p.doc_hash = doc_hash;
  p.original_length = original_length;
  p.attributes = cert.attributes;
  p.signed_at = signed_at;
  p.signer_pubkey = cert.signer_pubkey;
  p.cert = cert;
  p.verify_hint = verify_hint;
  p.signer_sig = signer_key.Sign(
      BuildTbs(doc_hash, original_length, p.attributes, signed_at, verify_hint)
          .view());
  return p;
}

VerificationReport VerifyPayload(const SignaturePayload& payload,
                                 const TrustRoots& trust_roots,
                                 std::string_view expected_doc_hash,
                                 const VerifyPolicy& policy) {
  using R = VerificationReport;
  const AttributeCertificate& cert = payload.cert;
  try {
    const auto root = trust_roots.find(cert.server_id);
    if (root == trust_roots.end()) return R::Invalid("untrusted key server");
    if (!VerifySignature(root->second, cert.SigningInput().view(),
                         cert.server_sig)) {
      return R::Invalid("key server signature invalid");
    }
    if (cert.expires_at < cert.issued_at ||
        cert.expires_at - cert.issued_at > kMaxCertificateWindow) {
      return R::Invalid("certificate validity window too long");
    }
    if (cert.attributes.empty() || !IsSortedUnique(cert.attributes)) {
      return R::Invalid("certificate attributes malformed");
    }
    if (payload.attributes != cert.attributes) {
      return R::Invalid("attributes do not match certificate");
    }
    if (payload.signer_pubkey != cert.signer_pubkey) {
      return R::Invalid("signer key does not match certificate");
    }
    const PublicKey signer = PublicKey::FromBase64Url(payload.signer_pubkey);
    const CanonicalBytes tbs =
        BuildTbs(payload.doc_hash, payload.original_length, payload.attributes,
                 payload.signed_at, payload.verify_hint);
    if (!VerifySignature(signer, tbs.view(), payload.signer_sig)) {
      return R::Invalid("signer signature invalid");
    }
    if (!IsHexDigest(payload.doc_hash) ||
        payload.doc_hash != expected_doc_hash) {
      return R::Invalid("document hash mismatch");
    }
    if (payload.signed_at < cert.issued_at - policy.clock_skew ||
        payload.signed_at > cert.expires_at + policy.clock_skew) {
      return R::Invalid("signing time outside certificate validity");
    }
    if (policy.now && payload.signed_at > *policy.now + policy.clock_skew) {
      return R::Invalid("signing time is in the future");
    }
  } catch (const std::exception& e) {
    return R::Invalid(std::string("malformed signature: ") + e.what());
  }
  return R::Intact(cert.attributes, payload.signed_at);
}

std::string SuccessCode(const SignaturePayload& payload) {
  return Digest(payload.Serialize()).substr(0, 8);
}

}  // namespace idsign::sig
