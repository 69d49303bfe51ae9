#include "idsign/session/session.h"

#include <array>

#include "idsign/error.h"

namespace idsign::session {

namespace {

constexpr std::array<std::pair<State, std::string_view>, 6> kStateNames{{
    {State::kCreated, "CREATED"},
    {State::kWalletConnected, "WALLET_CONNECTED"},
    {State::kDisclosed, "DISCLOSED"},
    {State::kCompleted, "COMPLETED"},
    {State::kCancelled, "CANCELLED"},
    {State::kExpired, "EXPIRED"},
}};

[[noreturn]] void Bad(const std::string& detail) {
  throw Error(ErrorCode::kBadRequest, detail);
}

const nlohmann::json& Field(const nlohmann::json& j, const char* key) {
  if (!j.is_object()) Bad("expected an object");
  const auto it = j.find(key);
  if (it == j.end()) Bad(std::string("missing field ") + key);
  return *it;
}

std::string StringField(const nlohmann::json& j, const char* key) {
  const auto& v = Field(j, key);
  if (!v.is_string()) Bad(std::string(key) + " must be a string");
  return v.get<std::string>();
}

std::vector<AttributeId> IdsFromJson(const nlohmann::json& j) {
  if (!j.is_array()) Bad("attribute list must be an array");
  std::vector<AttributeId> ids;
  for (const auto& v : j) {
    if (!v.is_string()) Bad("attribute id must be a string");
    try {
      ids.push_back(AttributeId::Parse(v.get<std::string>()));
    } catch (const Error& e) {
      Bad(e.what());
    }
  }
  return ids;
}

nlohmann::json IdsToJson(const std::vector<AttributeId>& ids) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& id : ids) j.push_back(id.Render());
  return j;
}

Timestamp TimeField(const nlohmann::json& j, const char* key) {
  try {
    return Timestamp::Parse(StringField(j, key));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBadRequest) throw;
    Bad(e.what());
  }
}

std::optional<sig::AttributeCertificate> CertFromJson(const nlohmann::json& j,
                                                      const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return sig::AttributeCertificate::FromJson(*it);
  } catch (const Error& e) {
    Bad(e.what());
  }
}

}  // namespace

std::string_view StateName(State state) {
  for (const auto& [s, name] : kStateNames) {
    if (s == state) return name;
  }
  return "UNKNOWN";
}

State ParseState(std::string_view name) {
  for (const auto& [s, n] : kStateNames) {
    if (n == name) return s;
  }
  Bad("unknown state " + std::string(name));
}

bool IsTerminal(State state) {
  return state == State::kCompleted || state == State::kCancelled ||
         state == State::kExpired;
}

bool IsLegalTransition(State from, State to) {
  if (IsTerminal(from)) return false;
  if (to == State::kCancelled || to == State::kExpired) return true;
  return (from == State::kCreated && to == State::kWalletConnected) ||
         (from == State::kWalletConnected && to == State::kDisclosed) ||
         (from == State::kDisclosed && to == State::kCompleted);
}

nlohmann::json SessionRecord::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  j["session_id"] = session_id;
  j["wallet_token"] = wallet_token;
  j["client_token"] = client_token;
  j["requested_attributes"] = IdsToJson(requested_attributes);
  j["doc_hash"] = doc_hash;
  j["signer_pubkey"] = signer_pubkey;
  j["state"] = std::string(StateName(state));
  j["created_at"] = created_at.ToString();
  if (cert) j["cert"] = cert->ToJson();
  if (closed_at) j["closed_at"] = closed_at->ToString();
  return j;
}

SessionRecord SessionRecord::FromJson(const nlohmann::json& j) {
  SessionRecord r;
  r.session_id = StringField(j, "session_id");
  r.wallet_token = StringField(j, "wallet_token");
  r.client_token = StringField(j, "client_token");
  r.requested_attributes = IdsFromJson(Field(j, "requested_attributes"));
  r.doc_hash = StringField(j, "doc_hash");
  r.signer_pubkey = StringField(j, "signer_pubkey");
  r.state = ParseState(StringField(j, "state"));
  r.created_at = TimeField(j, "created_at");
  r.cert = CertFromJson(j, "cert");
  if (j.contains("closed_at")) r.closed_at = TimeField(j, "closed_at");
  return r;
}

nlohmann::json QrPayload::ToJson() const {
  return nlohmann::json{{"u", u}, {"v", v}};
}

QrPayload QrPayload::Parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  QrPayload qr;
  if (text.starts_with("{")) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) Bad("QR payload is not JSON");
    qr.u = StringField(j, "u");
    qr.v = StringField(j, "v");
    if (qr.v != kQrVersion) Bad("unsupported QR version " + qr.v);
  } else {
    qr.u = std::string(text);
  }
  if (!qr.u.starts_with("http://") && !qr.u.starts_with("https://")) {
    Bad("QR payload does not hold an http(s) URL");
  }
  return qr;
}

nlohmann::json CreatedSession::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  j["session_id"] = session_id;
  j["client_token"] = client_token;
  j["qr"] = qr.ToJson();
  j["expires_at"] = expires_at.ToString();
  j["server_id"] = server_id;
  j["verify_hint"] = verify_hint;
  return j;
}

CreatedSession CreatedSession::FromJson(const nlohmann::json& j) {
  CreatedSession c;
  c.session_id = StringField(j, "session_id");
  c.client_token = StringField(j, "client_token");
  c.qr = QrPayload::Parse(Field(j, "qr").dump());
  c.expires_at = TimeField(j, "expires_at");
  c.server_id = StringField(j, "server_id");
  c.verify_hint = StringField(j, "verify_hint");
  return c;
}

nlohmann::json WalletRequest::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  j["requested_attributes"] = IdsToJson(requested_attributes);
  j["doc_hash"] = doc_hash;
  j["display_hint"] = display_hint;
  return j;
}

WalletRequest WalletRequest::FromJson(const nlohmann::json& j) {
  WalletRequest w;
  w.requested_attributes = IdsFromJson(Field(j, "requested_attributes"));
  w.doc_hash = StringField(j, "doc_hash");
  w.display_hint = StringField(j, "display_hint");
  return w;
}

nlohmann::json PollResult::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  j["state"] = std::string(StateName(state));
  j["cert"] = cert ? cert->ToJson() : nlohmann::json(nullptr);
  return j;
}

PollResult PollResult::FromJson(const nlohmann::json& j) {
  PollResult p;
  p.state = ParseState(StringField(j, "state"));
  p.cert = CertFromJson(j, "cert");
  return p;
}

}  // namespace idsign::session
