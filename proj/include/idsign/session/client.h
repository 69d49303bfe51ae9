#ifndef IDSIGN_SESSION_CLIENT_H_
#define IDSIGN_SESSION_CLIENT_H_

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "idsign/session/session.h"
#include "idsign/signature/engine.h"
#include "json.hpp"

namespace idsign::session {

struct HttpResult {
  int status = 0;
  std::string body;
};

// One request to an absolute http(s) URL. Throws Error(kNetworkError) when
// no response arrives.
HttpResult HttpCall(std::string_view method, std::string_view url,
                    const std::string& body = "",
                    std::string_view content_type = "application/json",
                    std::chrono::seconds timeout = std::chrono::seconds(10));

// Re-raises an {"error","detail"} body as Error with the same code; other
// non-2xx answers become Error(kServerRejected).
void ThrowIfFailed(const HttpResult& result);

// Client side of the key server API.
class ApiClient {
 public:
  explicit ApiClient(std::string base_url);

  CreatedSession CreateSession(const std::vector<AttributeId>& attributes,
                               const std::string& doc_hash,
                               const std::string& signer_pubkey) const;
  PollResult Poll(const std::string& session_id,
                  const std::string& client_token) const;
  void Cancel(const std::string& session_id,
              const std::string& client_token) const;
  sig::TrustRoots TrustRoots() const;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
};

// IDSIGN_SERVER, else http://127.0.0.1:8470.
std::string DefaultServerUrl();

}  // namespace idsign::session

#endif  // IDSIGN_SESSION_CLIENT_H_
