#ifndef IDSIGN_SESSION_HTTP_SERVER_H_
#define IDSIGN_SESSION_HTTP_SERVER_H_

#include <memory>
#include <ostream>
#include <string>

#include "idsign/error.h"
#include "idsign/session/service.h"

namespace idsign::session {

struct HttpServerOptions {
  std::string static_dir;          // served at "/" when set
  std::ostream* access_log = nullptr;
  std::size_t max_body_bytes = 32 * 1024 * 1024;
};

// HTTP+JSON front end under /api/v1:
//
//   POST   /session                       create            201
//   GET    /session/w/<wallet_token>      wallet fetch      200/404/409/410
//   POST   /session/w/<wallet_token>/disclose               200/400/404/409/410
//   GET    /session/<id>?token=<client>   poll              200/403/404
//   DELETE /session/<id>?token=<client>   cancel            204/403/404
//   POST   /verify                        PDF body -> VerificationReport
//   POST   /extract-original              PDF body -> signed original bytes
//   GET    /trust-roots                   {server_id: public key}
//   POST   /request                       build a request link
//   POST   /request/decode                decode a request token
//   POST   /request/validate              check a selection against it
//   GET    /health
//
// Errors are {"error": <code>, "detail": <text>}.
class HttpServer {
 public:
  HttpServer(SessionService& service, HttpServerOptions options = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port (pass 0 for an ephemeral one). Throws
  // Error(kIo) when the address is unavailable.
  int Bind(const std::string& host, int port);
  // Serves until Stop(); also expires sessions every second and drops
  // closed ones after an hour.
  void Run();
  void Stop();
  // Blocks until the server accepts connections.
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP status for an error code raised by the service.
int HttpStatusFor(ErrorCode code);

}  // namespace idsign::session

#endif  // IDSIGN_SESSION_HTTP_SERVER_H_
