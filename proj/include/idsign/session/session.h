#ifndef IDSIGN_SESSION_SESSION_H_
#define IDSIGN_SESSION_SESSION_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idsign/attribute.h"
#include "idsign/signature/engine.h"
#include "idsign/timestamp.h"
#include "json.hpp"

namespace idsign::session {

inline constexpr std::chrono::seconds kSessionLifetime{300};
inline constexpr char kQrVersion[] = "idsign-1";
inline constexpr std::size_t kTokenBytes = 16;

//   CREATED -> WALLET_CONNECTED -> DISCLOSED -> COMPLETED
// plus CANCELLED / EXPIRED from any non-terminal state.
enum class State {
  kCreated,
  kWalletConnected,
  kDisclosed,
  kCompleted,
  kCancelled,
  kExpired,
};

std::string_view StateName(State state);
// Throws Error(kBadRequest) for unknown names.
State ParseState(std::string_view name);
bool IsTerminal(State state);
bool IsLegalTransition(State from, State to);

struct SessionRecord {
  std::string session_id;
  std::string wallet_token;
  std::string client_token;
  std::vector<AttributeId> requested_attributes;
  std::string doc_hash;
  std::string signer_pubkey;
  State state = State::kCreated;
  Timestamp created_at;
  std::optional<sig::AttributeCertificate> cert;
  // Set once the transition to a terminal state happened; used for purging.
  std::optional<Timestamp> closed_at;

  nlohmann::json ToJson() const;
  // Throws Error(kBadRequest).
  static SessionRecord FromJson(const nlohmann::json& j);
  bool operator==(const SessionRecord&) const = default;
};

// What the QR code carries. |u| is the wallet endpoint and embeds only the
// wallet capability.
struct QrPayload {
  std::string u;
  std::string v = kQrVersion;

  nlohmann::json ToJson() const;
  // Accepts {"u","v"} JSON or a bare wallet URL. Throws Error(kBadRequest).
  static QrPayload Parse(std::string_view text);
  bool operator==(const QrPayload&) const = default;
};

struct CreatedSession {
  std::string session_id;
  std::string client_token;
  QrPayload qr;
  Timestamp expires_at;
  std::string server_id;
  std::string verify_hint;

  nlohmann::json ToJson() const;
  static CreatedSession FromJson(const nlohmann::json& j);
};

struct WalletRequest {
  std::vector<AttributeId> requested_attributes;
  std::string doc_hash;
  std::string display_hint;

  nlohmann::json ToJson() const;
  static WalletRequest FromJson(const nlohmann::json& j);
};

struct PollResult {
  State state = State::kCreated;
  std::optional<sig::AttributeCertificate> cert;

  nlohmann::json ToJson() const;
  static PollResult FromJson(const nlohmann::json& j);
};

}  // namespace idsign::session

#endif  // IDSIGN_SESSION_SESSION_H_
