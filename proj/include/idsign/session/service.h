#ifndef IDSIGN_SESSION_SERVICE_H_
#define IDSIGN_SESSION_SERVICE_H_

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "idsign/crypto.h"
#include "idsign/disclosure/credential.h"
#include "idsign/session/session.h"
#include "idsign/session/store.h"
#include "idsign/signature/engine.h"

namespace idsign::session {

struct ServiceOptions {
  std::string server_id;
  SigningKey server_key = SigningKey::Generate();
  sd::IssuerRegistry issuers;
  // Absolute URL the wallet reaches the service at, without trailing slash.
  std::string base_url;
  std::string verify_hint = sig::kDefaultVerifyHint;
  std::chrono::seconds lifetime = kSessionLifetime;
};

using Clock = std::function<Timestamp()>;
// Called for every state change, under the service lock.
using TransitionObserver =
    std::function<void(const std::string& session_id, State from, State to)>;

// The key server's session logic. All operations are linearizable: one
// mutex guards every read-modify-write of the store.
class SessionService {
 public:
  SessionService(ServiceOptions options, std::unique_ptr<SessionStore> store,
                 Clock clock = &Timestamp::Now);

  // Throws kEmptyRequest, kDuplicateAttribute, kBadRequest (doc_hash),
  // kInvalidKey (signer_pubkey).
  CreatedSession Create(std::vector<AttributeId> requested,
                        const std::string& doc_hash,
                        const std::string& signer_pubkey);

  // CREATED -> WALLET_CONNECTED. Throws kUnknownToken, kWrongState, kExpired.
  WalletRequest WalletFetch(const std::string& wallet_token);

  // WALLET_CONNECTED -> DISCLOSED. The certificate carries exactly the
  // requested attributes. Throws kUnknownToken, kWrongState, kExpired,
  // kDisclosureInvalid, kAttributesInsufficient.
  sig::AttributeCertificate WalletDisclose(const std::string& wallet_token,
                                           const sd::Disclosure& disclosure);

  // Delivers the certificate once (DISCLOSED -> COMPLETED). Throws
  // kUnknownSession, kBadToken.
  PollResult Poll(const std::string& session_id,
                  const std::string& client_token);

  // Non-terminal -> CANCELLED; terminal sessions are left alone. Throws
  // kUnknownSession, kBadToken.
  void Cancel(const std::string& session_id, const std::string& client_token);

  // Moves non-terminal sessions at least |lifetime| old to EXPIRED.
  std::size_t ExpireSessions(Timestamp now);
  // Drops terminal sessions closed before |cutoff|.
  std::size_t PurgeClosed(Timestamp cutoff);

  void SetObserver(TransitionObserver observer);

  const std::string& server_id() const { return options_.server_id; }
  PublicKey server_public_key() const { return options_.server_key.public_key(); }
  sig::TrustRoots trust_roots() const;
  const std::string& verify_hint() const { return options_.verify_hint; }
  const std::string& base_url() const { return options_.base_url; }
  Timestamp now() const { return clock_(); }

  // Snapshot of a record, for tests and diagnostics.
  std::optional<SessionRecord> Inspect(const std::string& session_id) const;

 private:
  SessionRecord LoadForWallet(const std::string& wallet_token, Timestamp now);
  SessionRecord LoadForClient(const std::string& session_id,
                              const std::string& client_token);
  bool ExpireIfStale(SessionRecord& record, Timestamp now);
  void Transition(SessionRecord& record, State to, Timestamp now);
  std::string NewToken() const;

  ServiceOptions options_;
  std::unique_ptr<SessionStore> store_;
  Clock clock_;
  TransitionObserver observer_;
  mutable std::mutex mu_;
};

}  // namespace idsign::session

#endif  // IDSIGN_SESSION_SERVICE_H_
