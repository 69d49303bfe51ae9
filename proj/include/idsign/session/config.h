#ifndef IDSIGN_SESSION_CONFIG_H_
#define IDSIGN_SESSION_CONFIG_H_

#include <filesystem>
#include <string>

#include "idsign/crypto.h"
#include "idsign/disclosure/credential.h"
#include "idsign/signature/engine.h"

namespace idsign::session {

inline constexpr int kDefaultPort = 8470;

// Server configuration file (JSON):
//
//   {
//     "server_id": "idsign-local",
//     "listen": {"host": "127.0.0.1", "port": 8470},
//     "base_url": "http://127.0.0.1:8470",
//     "server_key_seed": "<base64url, 32 bytes>",
//     "issuers": {"demo-issuer": "<base64url public key>"},
//     "verify_hint": "Verify at ...",
//     "static_dir": "",
//     "session_store": ""
//   }
//
// Every field is optional except that a missing server_key_seed is
// generated and written back. Environment overrides: IDSIGN_LISTEN_PORT,
// IDSIGN_BASE_URL.
struct ServerConfig {
  std::string server_id = "idsign-local";
  std::string listen_host = "127.0.0.1";
  int listen_port = kDefaultPort;
  std::string base_url;  // defaults to http://<host>:<port>
  SigningKey server_key = SigningKey::Generate();
  sd::IssuerRegistry issuers;
  std::string verify_hint;  // defaults to "Verify at <base_url>/ ..."
  std::string static_dir;
  std::string session_store;  // empty: in-memory only

  // Reads |path|; creates it with defaults (the demo issuer trusted and a
  // fresh server key) when it does not exist. Throws Error(kConfig) or
  // Error(kIo).
  static ServerConfig LoadOrCreate(const std::filesystem::path& path);

  // Applies IDSIGN_LISTEN_PORT and IDSIGN_BASE_URL, then fills derived
  // defaults.
  void ApplyEnvironment();

  nlohmann::json ToJson() const;
  void Save(const std::filesystem::path& path) const;

  sig::TrustRoots trust_roots() const;
};

// IDSIGN_CONFIG, else ~/.idsign/server.json.
std::filesystem::path DefaultConfigPath();

}  // namespace idsign::session

#endif  // IDSIGN_SESSION_CONFIG_H_
