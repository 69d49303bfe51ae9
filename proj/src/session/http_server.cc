#include "idsign/session/http_server.h"

#include <condition_variable>
#include <filesystem>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "idsign/error.h"
#include "idsign/pdf/container.h"
#include "idsign/request/request.h"

namespace idsign::session {

namespace {

constexpr char kJson[] = "application/json";
constexpr std::chrono::hours kClosedRetention{1};

void SendJson(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void SendError(httplib::Response& res, const Error& e) {
  SendJson(res, HttpStatusFor(e.code()),
           {{"error", std::string(ErrorCodeName(e.code()))},
            {"detail", e.detail()}});
}

nlohmann::json ParseBody(const httplib::Request& req) {
  auto j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kBadRequest, "body must be a JSON object");
  }
  return j;
}

std::vector<AttributeId> IdList(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw Error(ErrorCode::kBadRequest,
                std::string(key) + " must be an array of attribute ids");
  }
  std::vector<AttributeId> ids;
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw Error(ErrorCode::kBadRequest, "attribute id must be a string");
    }
    ids.push_back(AttributeId::Parse(v.get<std::string>()));
  }
  return ids;
}

std::string Str(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kBadRequest, std::string(key) + " must be a string");
  }
  return it->get<std::string>();
}

// Runs |fn|, mapping library errors to JSON error responses.
template <typename Fn>
httplib::Server::Handler Guard(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      SendError(res, e);
    } catch (const nlohmann::json::exception& e) {
      SendError(res, Error(ErrorCode::kBadRequest, e.what()));
    }
  };
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownToken:
    case ErrorCode::kUnknownSession:
      return 404;
    case ErrorCode::kBadToken:
      return 403;
    case ErrorCode::kWrongState:
      return 409;
    case ErrorCode::kExpired:
      return 410;
    case ErrorCode::kIo:
    case ErrorCode::kConfig:
      return 500;
    default:
      return 400;
  }
}

struct HttpServer::Impl {
  SessionService& service;
  HttpServerOptions options;
  httplib::Server server;
  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;

  Impl(SessionService& s, HttpServerOptions o)
      : service(s), options(std::move(o)) {}

  void Routes();
  void Janitor();
};

void HttpServer::Impl::Routes() {
  server.set_payload_max_length(options.max_body_bytes);
  if (options.access_log != nullptr) {
    server.set_logger([this](const httplib::Request& req,
                             const httplib::Response& res) {
      std::lock_guard lock(mu);
      *options.access_log << req.method << " " << req.path << " "
                          << res.status << "\n";
    });
  }

  server.Post("/api/v1/session", Guard([this](const httplib::Request& req,
                                              httplib::Response& res) {
    const auto j = ParseBody(req);
    const CreatedSession c = service.Create(
        IdList(j, "attributes"), Str(j, "doc_hash"), Str(j, "signer_pubkey"));
    SendJson(res, 201, c.ToJson());
  }));

  server.Get(R"(/api/v1/session/w/([A-Za-z0-9_-]+))",
             Guard([this](const httplib::Request& req, httplib::Response& res) {
               SendJson(res, 200,
                        service.WalletFetch(req.matches[1]).ToJson());
             }));

  server.Post(
      R"(/api/v1/session/w/([A-Za-z0-9_-]+)/disclose)",
      Guard([this](const httplib::Request& req, httplib::Response& res) {
        const auto j = ParseBody(req);
        sd::Disclosure d;
        try {
          d = sd::Disclosure::FromJson(j);
        } catch (const Error& e) {
          throw Error(ErrorCode::kBadRequest, e.what());
        }
        const auto cert = service.WalletDisclose(req.matches[1], d);
        SendJson(res, 200, {{"cert", cert.ToJson()}});
      }));

  server.Get(R"(/api/v1/session/([A-Za-z0-9_-]+))",
             Guard([this](const httplib::Request& req, httplib::Response& res) {
               SendJson(res, 200,
                        service.Poll(req.matches[1],
                                     req.get_param_value("token"))
                            .ToJson());
             }));

  server.Delete(R"(/api/v1/session/([A-Za-z0-9_-]+))",
                Guard([this](const httplib::Request& req,
                             httplib::Response& res) {
                  service.Cancel(req.matches[1], req.get_param_value("token"));
                  res.status = 204;
                }));

  server.Post("/api/v1/verify", Guard([this](const httplib::Request& req,
                                             httplib::Response& res) {
    const auto report =
        pdf::VerifyFile(req.body, service.trust_roots(), service.now());
    SendJson(res, 200, report.ToJson());
  }));

  server.Post("/api/v1/extract-original",
              Guard([](const httplib::Request& req, httplib::Response& res) {
                res.status = 200;
                res.set_content(pdf::ExtractOriginal(req.body),
                                "application/pdf");
              }));

  server.Get("/api/v1/trust-roots",
             Guard([this](const httplib::Request&, httplib::Response& res) {
               nlohmann::json j = nlohmann::json::object();
               for (const auto& [id, key] : service.trust_roots()) {
                 j[id] = key.ToBase64Url();
               }
               SendJson(res, 200, j);
             }));

  server.Post("/api/v1/request", Guard([this](const httplib::Request& req,
                                              httplib::Response& res) {
    const auto j = ParseBody(req);
    std::optional<std::string> message;
    if (j.contains("message") && !j["message"].is_null()) {
      message = Str(j, "message");
    }
    const auto spec = request::RequestSpec::Make(
        Str(j, "file_name"), IdList(j, "attributes"), message);
    const std::string base =
        j.contains("base_url") ? Str(j, "base_url") : service.base_url();
    const std::string url = request::EncodeRequest(spec, base);
    SendJson(res, 200,
             {{"url", url},
              {"token", url.substr(url.rfind('#') + 1)},
              {"message", request::ShareMessage(spec, url)},
              {"spec", spec.ToJson()}});
  }));

  server.Post("/api/v1/request/decode", Guard([](const httplib::Request& req,
                                                 httplib::Response& res) {
    const auto j = ParseBody(req);
    SendJson(res, 200, request::DecodeRequest(Str(j, "token")).ToJson());
  }));

  server.Post("/api/v1/request/validate",
              Guard([](const httplib::Request& req, httplib::Response& res) {
                const auto j = ParseBody(req);
                const auto spec = request::DecodeRequest(Str(j, "token"));
                const auto violations = request::ValidateAgainstRequest(
                    spec, Str(j, "file_name"), IdList(j, "attributes"));
                nlohmann::json list = nlohmann::json::array();
                for (const auto& v : violations) list.push_back(v.ToJson());
                SendJson(res, 200,
                         {{"ok", violations.empty()}, {"violations", list}});
              }));

  server.Get("/api/v1/health",
             [this](const httplib::Request&, httplib::Response& res) {
               SendJson(res, 200,
                        {{"status", "ok"}, {"server_id", service.server_id()}});
             });

  if (!options.static_dir.empty() &&
      std::filesystem::is_directory(options.static_dir)) {
    server.set_mount_point("/", options.static_dir);
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(
          "IdentitySign key server. The API lives under /api/v1.\n",
          "text/plain");
    });
  }
}

void HttpServer::Impl::Janitor() {
  std::unique_lock lock(mu);
  while (!cv.wait_for(lock, std::chrono::seconds(1),
                      [this] { return stopping; })) {
    lock.unlock();
    const Timestamp now = service.now();
    service.ExpireSessions(now);
    service.PurgeClosed(now - kClosedRetention);
    lock.lock();
  }
}

HttpServer::HttpServer(SessionService& service, HttpServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  impl_->Routes();
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" +
                                    std::to_string(port));
  }
  return bound;
}

void HttpServer::Run() {
  std::thread janitor([this] { impl_->Janitor(); });
  impl_->server.listen_after_bind();
  {
    std::lock_guard lock(impl_->mu);
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  janitor.join();
}

void HttpServer::Stop() {
  {
    std::lock_guard lock(impl_->mu);
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  impl_->server.stop();
}

void HttpServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace idsign::session
