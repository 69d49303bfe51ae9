#include "idsign/session/service.h"

#include <algorithm>

#include "idsign/error.h"

namespace idsign::session {

namespace {

std::string Reason(const Error& e) {
  std::string s(ErrorCodeName(e.code()));
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

std::string DisplayHint(const std::vector<AttributeId>& ids,
                        const std::string& doc_hash) {
  std::string names;
  for (const auto& id : ids) {
    if (!names.empty()) names += ", ";
    names += id.attribute();
  }
  return "Share " + names + " to sign the document with fingerprint " +
         doc_hash.substr(0, 16);
}

}  // namespace

SessionService::SessionService(ServiceOptions options,
                               std::unique_ptr<SessionStore> store,
                               Clock clock)
    : options_(std::move(options)),
      store_(std::move(store)),
      clock_(std::move(clock)) {
  while (!options_.base_url.empty() && options_.base_url.back() == '/') {
    options_.base_url.pop_back();
  }
}

std::string SessionService::NewToken() const {
  return Base64UrlEncode(RandomBytes(kTokenBytes));
}

void SessionService::Transition(SessionRecord& record, State to,
                                Timestamp now) {
  const State from = record.state;
  if (!IsLegalTransition(from, to)) {
    throw std::logic_error("illegal session transition " +
                           std::string(StateName(from)) + " -> " +
                           std::string(StateName(to)));
  }
  record.state = to;
  if (IsTerminal(to)) record.closed_at = now;
  store_->Put(record);
  if (observer_) observer_(record.session_id, from, to);
}

bool SessionService::ExpireIfStale(SessionRecord& record, Timestamp now) {
  if (IsTerminal(record.state)) return false;
  if (now - record.created_at < options_.lifetime) return false;
  Transition(record, State::kExpired, now);
  return true;
}

CreatedSession SessionService::Create(std::vector<AttributeId> requested,
                                      const std::string& doc_hash,
                                      const std::string& signer_pubkey) {
  if (requested.empty()) {
    throw Error(ErrorCode::kEmptyRequest, "no attributes requested");
  }
  requested = SortedUnique(std::move(requested));
  if (!IsHexDigest(doc_hash)) {
    throw Error(ErrorCode::kBadRequest, "doc_hash is not a hex digest");
  }
  PublicKey::FromBase64Url(signer_pubkey);

  std::lock_guard lock(mu_);
  const Timestamp now = clock_();
  SessionRecord r;
  do {
    r.session_id = NewToken();
  } while (store_->Get(r.session_id));
  do {
    r.wallet_token = NewToken();
  } while (store_->FindByWalletToken(r.wallet_token));
  r.client_token = NewToken();
  r.requested_attributes = std::move(requested);
  r.doc_hash = doc_hash;
  r.signer_pubkey = signer_pubkey;
  r.state = State::kCreated;
  r.created_at = now;
  store_->Put(r);

  CreatedSession out;
  out.session_id = r.session_id;
  out.client_token = r.client_token;
  out.qr.u = options_.base_url + "/api/v1/session/w/" + r.wallet_token;
  out.expires_at = now + options_.lifetime;
  out.server_id = options_.server_id;
  out.verify_hint = options_.verify_hint;
  return out;
}

SessionRecord SessionService::LoadForWallet(const std::string& wallet_token,
                                            Timestamp now) {
  auto r = store_->FindByWalletToken(wallet_token);
  if (!r) throw Error(ErrorCode::kUnknownToken, "unknown wallet token");
  ExpireIfStale(*r, now);
  if (r->state == State::kExpired) {
    throw Error(ErrorCode::kExpired, "session expired");
  }
  return *r;
}

SessionRecord SessionService::LoadForClient(const std::string& session_id,
                                            const std::string& client_token) {
  auto r = store_->Get(session_id);
  if (!r) throw Error(ErrorCode::kUnknownSession, "unknown session");
  if (!ConstantTimeEquals(r->client_token, client_token)) {
    throw Error(ErrorCode::kBadToken, "client token does not match");
  }
  return *r;
}

WalletRequest SessionService::WalletFetch(const std::string& wallet_token) {
  std::lock_guard lock(mu_);
  const Timestamp now = clock_();
  SessionRecord r = LoadForWallet(wallet_token, now);
  if (r.state != State::kCreated) {
    throw Error(ErrorCode::kWrongState,
                "session is " + std::string(StateName(r.state)));
  }
  Transition(r, State::kWalletConnected, now);
  return {r.requested_attributes, r.doc_hash,
          DisplayHint(r.requested_attributes, r.doc_hash)};
}

sig::AttributeCertificate SessionService::WalletDisclose(
    const std::string& wallet_token, const sd::Disclosure& disclosure) {
  std::lock_guard lock(mu_);
  const Timestamp now = clock_();
  SessionRecord r = LoadForWallet(wallet_token, now);
  if (r.state != State::kWalletConnected) {
    throw Error(ErrorCode::kWrongState,
                "session is " + std::string(StateName(r.state)));
  }

  std::vector<AttributeValue> revealed;
  try {
    revealed = sd::VerifyDisclosure(disclosure, options_.issuers, now);
  } catch (const Error& e) {
    throw Error(ErrorCode::kDisclosureInvalid, Reason(e));
  }
  std::vector<AttributeValue> granted;
  for (const auto& id : r.requested_attributes) {
    const auto it =
        std::find_if(revealed.begin(), revealed.end(),
                     [&](const AttributeValue& a) { return a.id() == id; });
    if (it == revealed.end()) {
      throw Error(ErrorCode::kAttributesInsufficient,
                  "missing " + id.Render());
    }
    granted.push_back(*it);
  }

  r.cert = sig::IssueCertificate(
      options_.server_key, options_.server_id,
      PublicKey::FromBase64Url(r.signer_pubkey), std::move(granted),
      r.session_id, now);
  Transition(r, State::kDisclosed, now);
  return *r.cert;
}

PollResult SessionService::Poll(const std::string& session_id,
                                const std::string& client_token) {
  std::lock_guard lock(mu_);
  const Timestamp now = clock_();
  SessionRecord r = LoadForClient(session_id, client_token);
  ExpireIfStale(r, now);
  PollResult out;
  if (r.state == State::kDisclosed) {
    out.cert = r.cert;
    Transition(r, State::kCompleted, now);
  }
  out.state = r.state;
  return out;
}

void SessionService::Cancel(const std::string& session_id,
                            const std::string& client_token) {
  std::lock_guard lock(mu_);
  SessionRecord r = LoadForClient(session_id, client_token);
  if (!IsTerminal(r.state)) Transition(r, State::kCancelled, clock_());
}

std::size_t SessionService::ExpireSessions(Timestamp now) {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& id : store_->Ids()) {
    auto r = store_->Get(id);
    if (r && ExpireIfStale(*r, now)) ++n;
  }
  return n;
}

std::size_t SessionService::PurgeClosed(Timestamp cutoff) {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& id : store_->Ids()) {
    const auto r = store_->Get(id);
    if (r && IsTerminal(r->state) && r->closed_at && *r->closed_at < cutoff) {
      store_->Erase(id);
      ++n;
    }
  }
  return n;
}

void SessionService::SetObserver(TransitionObserver observer) {
  std::lock_guard lock(mu_);
  observer_ = std::move(observer);
}

sig::TrustRoots SessionService::trust_roots() const {
  return {{options_.server_id, options_.server_key.public_key()}};
}

std::optional<SessionRecord> SessionService::Inspect(
    const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return store_->Get(session_id);
}

}  // namespace idsign::session
