#include "idsign/session/client.h"

#include <cstdlib>

#include "httplib.h"
#include "idsign/error.h"

namespace idsign::session {

namespace {

// Splits "http://host:port/path?x" into origin and path.
std::pair<std::string, std::string> SplitUrl(std::string_view url) {
  const auto scheme = url.find("://");
  if (scheme == std::string_view::npos) {
    throw Error(ErrorCode::kNetworkError, "not an absolute URL: " +
                                              std::string(url));
  }
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, slash)), std::string(url.substr(slash))};
}

nlohmann::json ParseJson(const HttpResult& r) {
  auto j = nlohmann::json::parse(r.body, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kServerRejected, "response is not JSON");
  }
  return j;
}

}  // namespace

HttpResult HttpCall(std::string_view method, std::string_view url,
                    const std::string& body, std::string_view content_type,
                    std::chrono::seconds timeout) {
  const auto [origin, path] = SplitUrl(url);
  httplib::Client client(origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Result res;
  const std::string type(content_type);
  if (method == "GET") {
    res = client.Get(path);
  } else if (method == "POST") {
    res = client.Post(path, body, type);
  } else if (method == "DELETE") {
    res = client.Delete(path);
  } else {
    throw std::invalid_argument("unsupported method");
  }
  if (!res) {
    throw Error(ErrorCode::kNetworkError,
                origin + ": " + httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

void ThrowIfFailed(const HttpResult& r) {
  if (r.status >= 200 && r.status < 300) return;
  const auto j = nlohmann::json::parse(r.body, nullptr, false);
  if (!j.is_discarded() && j.is_object() && j.contains("error") &&
      j["error"].is_string()) {
    const std::string name = j["error"].get<std::string>();
    const std::string detail =
        j.contains("detail") && j["detail"].is_string()
            ? j["detail"].get<std::string>()
            : "";
    if (const auto code = ErrorCodeFromName(name)) throw Error(*code, detail);
    throw Error(ErrorCode::kServerRejected, name + ": " + detail);
  }
  throw Error(ErrorCode::kServerRejected,
              "HTTP status " + std::to_string(r.status));
}

ApiClient::ApiClient(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

CreatedSession ApiClient::CreateSession(
    const std::vector<AttributeId>& attributes, const std::string& doc_hash,
    const std::string& signer_pubkey) const {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& id : attributes) ids.push_back(id.Render());
  const nlohmann::json body = {{"attributes", ids},
                               {"doc_hash", doc_hash},
                               {"signer_pubkey", signer_pubkey}};
  const HttpResult r =
      HttpCall("POST", base_url_ + "/api/v1/session", body.dump());
  ThrowIfFailed(r);
  return CreatedSession::FromJson(ParseJson(r));
}

PollResult ApiClient::Poll(const std::string& session_id,
                           const std::string& client_token) const {
  const HttpResult r = HttpCall(
      "GET", base_url_ + "/api/v1/session/" + session_id + "?token=" +
                 client_token);
  ThrowIfFailed(r);
  return PollResult::FromJson(ParseJson(r));
}

void ApiClient::Cancel(const std::string& session_id,
                       const std::string& client_token) const {
  ThrowIfFailed(HttpCall("DELETE", base_url_ + "/api/v1/session/" +
                                       session_id + "?token=" + client_token));
}

sig::TrustRoots ApiClient::TrustRoots() const {
  const HttpResult r = HttpCall("GET", base_url_ + "/api/v1/trust-roots");
  ThrowIfFailed(r);
  const auto j = ParseJson(r);
  if (!j.is_object()) {
    throw Error(ErrorCode::kServerRejected, "trust roots must be an object");
  }
  sig::TrustRoots roots;
  for (const auto& [id, key] : j.items()) {
    if (!key.is_string()) {
      throw Error(ErrorCode::kServerRejected, "trust root must be a string");
    }
    roots[id] = PublicKey::FromBase64Url(key.get<std::string>());
  }
  return roots;
}

std::string DefaultServerUrl() {
  if (const char* env = std::getenv("IDSIGN_SERVER"); env && *env) return env;
  return "http://127.0.0.1:" + std::to_string(8470);
}

}  // namespace idsign::session
