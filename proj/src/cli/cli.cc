#include "idsign/cli/cli.h"

#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "idsign/crypto.h"
#include "idsign/disclosure/demo_issuer.h"
#include "idsign/error.h"
#include "idsign/pdf/container.h"
#include "idsign/request/request.h"
#include "idsign/session/client.h"
#include "idsign/session/config.h"
#include "idsign/session/http_server.h"
#include "idsign/session/service.h"
#include "idsign/wallet/wallet.h"

namespace idsign::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
}

// "fullName,email" or full ids. Bare names belong to the demo credential.
std::vector<AttributeId> ParseAttrList(const std::string& text) {
  std::vector<AttributeId> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, e - b + 1);
    if (item.find('.') == std::string::npos) {
      item = sd::kDemoCredentialPrefix + item;
    }
    ids.push_back(AttributeId::Parse(item));
  }
  return ids;
}

bool IsRemoteFailure(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNetworkError:
    case ErrorCode::kServerRejected:
    case ErrorCode::kUnknownToken:
    case ErrorCode::kWrongState:
    case ErrorCode::kExpired:
    case ErrorCode::kDisclosureInvalid:
    case ErrorCode::kAttributesInsufficient:
    case ErrorCode::kUnknownSession:
    case ErrorCode::kBadToken:
    case ErrorCode::kNotResolvable:
      return true;
    default:
      return false;
  }
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::istream& in;
  bool json_output = false;

  int Fail(const Error& e) const {
    if (json_output) {
      out << json::object({{"error", std::string(ErrorCodeName(e.code()))},
                           {"detail", e.detail()}})
                 .dump()
          << "\n";
    }
    err << "error: " << e.what() << "\n";
    return IsRemoteFailure(e.code()) ? kExitRemote : kExitUsage;
  }

  bool Confirm(const std::string& question) const {
    out << question << " [y/N] " << std::flush;
    std::string answer;
    if (!std::getline(in, answer)) return false;
    return answer == "y" || answer == "Y" || answer == "yes";
  }
};

std::string AttributeLine(const AttributeValue& a) {
  return a.id().attribute() + ": " + a.value() + " (" + a.id().Render() + ")";
}

// ---------------------------------------------------------------- sign

struct SignArgs {
  std::string file;
  std::string attrs;
  std::string request_token;
  std::string server;
  std::string output;
  std::string wallet_path;
  bool auto_approve = false;
};

int RunSign(const Context& ctx, const SignArgs& a) {
  const std::string original = ReadFile(a.file);
  pdf::DetectPdf(original);

  std::vector<AttributeId> attrs;
  if (!a.attrs.empty()) attrs = ParseAttrList(a.attrs);
  if (!a.request_token.empty()) {
    const auto spec = request::DecodeRequest(a.request_token);
    if (attrs.empty()) attrs = spec.required_attributes;
    const auto violations = request::ValidateAgainstRequest(
        spec, fs::path(a.file).filename().string(), attrs);
    if (!violations.empty()) {
      json list = json::array();
      for (const auto& v : violations) {
        list.push_back(v.ToJson());
        ctx.err << "request violation: " << v.ToString() << "\n";
      }
      if (ctx.json_output) ctx.out << json{{"violations", list}}.dump() << "\n";
      return kExitUsage;
    }
  }
  if (attrs.empty()) {
    throw Error(ErrorCode::kEmptyRequest, "pass --attrs or --request");
  }
  attrs = SortedUnique(std::move(attrs));

  const std::string server =
      a.server.empty() ? session::DefaultServerUrl() : a.server;
  const session::ApiClient api(server);
  const SigningKey signer = SigningKey::Generate();
  const std::string doc_hash = Digest(original);
  const session::CreatedSession created =
      api.CreateSession(attrs, doc_hash, signer.public_key().ToBase64Url());

  const bool in_process = a.auto_approve || !a.wallet_path.empty();
  if (in_process) {
    const fs::path wallet_path =
        a.wallet_path.empty() ? wallet::DefaultWalletPath() : fs::path(a.wallet_path);
    const auto store = wallet::WalletStore::Load(wallet_path);
    const auto prompt = wallet::Scan(store, created.qr);
    if (!prompt.resolvable) {
      ctx.err << prompt.ToText(store);
      throw Error(ErrorCode::kNotResolvable,
                  "wallet lacks requested attributes");
    }
    if (!a.auto_approve) {
      ctx.out << prompt.ToText(store);
      if (!ctx.Confirm("Disclose these attributes?")) {
        wallet::Deny(prompt);
        api.Cancel(created.session_id, created.client_token);
        ctx.err << "declined\n";
        return kExitRemote;
      }
    }
    wallet::Approve(store, prompt);
  } else if (!ctx.json_output) {
    ctx.out << "Scan this QR payload with a wallet, e.g.\n  idsign wallet "
               "approve '"
            << created.qr.ToJson().dump() << "'\n"
            << std::flush;
  } else {
    ctx.err << created.qr.ToJson().dump() << "\n";
  }

  std::optional<sig::AttributeCertificate> cert;
  const auto deadline = created.expires_at + std::chrono::seconds(2);
  while (true) {
    const session::PollResult poll =
        api.Poll(created.session_id, created.client_token);
    if (poll.cert) {
      cert = poll.cert;
      break;
    }
    if (session::IsTerminal(poll.state)) {
      throw Error(ErrorCode::kServerRejected,
                  "session ended in state " +
                      std::string(session::StateName(poll.state)));
    }
    if (Timestamp::Now() > deadline) {
      throw Error(ErrorCode::kExpired, "no disclosure before the deadline");
    }
    std::this_thread::sleep_for(std::chrono::seconds(1));
  }

  const sig::SignaturePayload payload =
      sig::SignDocument(signer, doc_hash, original.size(), *cert,
                        Timestamp::Now(), created.verify_hint);
  const std::string signed_bytes = pdf::Embed(original, payload);
  std::string output = a.output;
  if (output.empty()) {
    const fs::path p(a.file);
    output = (p.parent_path() / (p.stem().string() + "-signed.pdf")).string();
  }
  WriteFile(output, signed_bytes);

  const std::string code = sig::SuccessCode(payload);
  if (ctx.json_output) {
    ctx.out << json{{"output", output},
                    {"signer_attributes", AttributesToJson(payload.attributes)},
                    {"signed_at", payload.signed_at.ToString()},
                    {"success_code", code}}
                   .dump()
            << "\n";
  } else {
    ctx.out << "Signed by:\n";
    for (const auto& attr : payload.attributes) {
      ctx.out << "  " << AttributeLine(attr) << "\n";
    }
    ctx.out << "Wrote " << output << "\n";
    ctx.out << "Success code: " << code << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verify

sig::TrustRoots LoadTrustFile(const std::string& path) {
  const auto j = json::parse(ReadFile(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kConfig, path + ": trust file must be an object");
  }
  sig::TrustRoots roots;
  for (const auto& [id, key] : j.items()) {
    if (!key.is_string()) {
      throw Error(ErrorCode::kConfig, path + ": keys must be strings");
    }
    roots[id] = PublicKey::FromBase64Url(key.get<std::string>());
  }
  return roots;
}

struct VerifyArgs {
  std::string file;
  std::string trust;
  std::string config;
  std::string server;
};

sig::TrustRoots ResolveTrust(const Context& ctx, const VerifyArgs& a) {
  if (!a.trust.empty()) return LoadTrustFile(a.trust);
  if (!a.config.empty()) {
    return session::ServerConfig::LoadOrCreate(a.config).trust_roots();
  }
  if (const char* env = std::getenv("IDSIGN_TRUST"); env && *env) {
    return LoadTrustFile(env);
  }
  const std::string server =
      a.server.empty() ? session::DefaultServerUrl() : a.server;
  try {
    return session::ApiClient(server).TrustRoots();
  } catch (const Error& e) {
    ctx.err << "warning: no trust roots (" << e.what()
            << "); pass --trust or --config\n";
    return {};
  }
}

int RunVerify(const Context& ctx, const VerifyArgs& a) {
  const std::string bytes = ReadFile(a.file);
  sig::TrustRoots roots;
  bool has_markers = true;
  try {
    pdf::Extract(bytes);
  } catch (const Error& e) {
    has_markers = e.code() != ErrorCode::kNoSignature;
  }
  if (has_markers) roots = ResolveTrust(ctx, a);
  const sig::VerificationReport report =
      pdf::VerifyFile(bytes, roots, Timestamp::Now());

  if (ctx.json_output) {
    ctx.out << report.ToJson().dump() << "\n";
  } else {
    switch (report.status) {
      case sig::VerificationStatus::kIntactSignature:
        ctx.out << "INTACT_SIGNATURE\nSigned by:\n";
        for (const auto& attr : report.signer_attributes) {
          ctx.out << "  " << AttributeLine(attr) << "\n";
        }
        ctx.out << "Signed at: " << report.signed_at->ToString() << "\n";
        break;
      case sig::VerificationStatus::kNoSignature:
        ctx.out << "NO_SIGNATURE: this file does not contain a signature\n";
        break;
      case sig::VerificationStatus::kInvalidSignature:
        ctx.out << "INVALID_SIGNATURE: " << report.failure_reason.value_or("")
                << "\n";
        break;
    }
    if (!report.warnings.empty()) {
      ctx.out << "Warnings:";
      for (const auto& w : report.warnings) ctx.out << " " << w;
      ctx.out << "\n";
    }
    if (report.intact()) {
      ctx.out << "Check that this is the person or organization you expected "
                 "to sign this document.\n";
    }
  }
  switch (report.status) {
    case sig::VerificationStatus::kIntactSignature:
      return kExitOk;
    case sig::VerificationStatus::kNoSignature:
      return kExitNoSignature;
    case sig::VerificationStatus::kInvalidSignature:
      return kExitInvalid;
  }
  return kExitInvalid;
}

// ---------------------------------------------------------------- request

int RunRequest(const Context& ctx, const std::string& file_name,
               const std::string& attrs, const std::string& message,
               bool has_message, const std::string& base_url) {
  std::optional<std::string_view> msg;
  if (has_message) msg = message;
  const auto spec =
      request::RequestSpec::Make(file_name, ParseAttrList(attrs), msg);
  const std::string base =
      base_url.empty() ? session::DefaultServerUrl() : base_url;
  const std::string url = request::EncodeRequest(spec, base);
  const std::string text = request::ShareMessage(spec, url);
  if (ctx.json_output) {
    ctx.out << json{{"url", url}, {"message", text}, {"spec", spec.ToJson()}}
                   .dump()
            << "\n";
  } else {
    ctx.out << url << "\n" << text << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- serve

int RunServe(const Context& ctx, const std::string& config_path, int port,
             const std::string& static_dir, bool quiet) {
  const fs::path path =
      config_path.empty() ? session::DefaultConfigPath() : fs::path(config_path);
  auto config = session::ServerConfig::LoadOrCreate(path);
  if (port >= 0) config.listen_port = port;
  if (!static_dir.empty()) config.static_dir = static_dir;
  config.ApplyEnvironment();

  std::unique_ptr<session::SessionStore> store;
  if (config.session_store.empty()) {
    store = std::make_unique<session::MemorySessionStore>();
  } else {
    store = std::make_unique<session::FileSessionStore>(config.session_store);
  }
  session::ServiceOptions options;
  options.server_id = config.server_id;
  options.server_key = config.server_key;
  options.issuers = config.issuers;
  options.base_url = config.base_url;
  options.verify_hint = config.verify_hint;
  session::SessionService service(std::move(options), std::move(store));

  session::HttpServerOptions http;
  http.static_dir = config.static_dir;
  if (!quiet) http.access_log = &ctx.err;
  session::HttpServer server(service, http);

  // Signals are taken synchronously by a watcher thread; every thread
  // started after this point inherits the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  const int bound = server.Bind(config.listen_host, config.listen_port);
  if (ctx.json_output) {
    ctx.out << json{{"listening", config.listen_host + ":" +
                                      std::to_string(bound)},
                    {"base_url", config.base_url},
                    {"server_id", config.server_id},
                    {"config", path.string()}}
                   .dump()
            << "\n"
            << std::flush;
  } else {
    ctx.out << "IdentitySign key server " << config.server_id
            << " listening on " << config.listen_host << ":" << bound << "\n"
            << "Config: " << path.string() << "\n"
            << std::flush;
  }

  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });
  server.Run();
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  return kExitOk;
}

// ---------------------------------------------------------------- wallet

int RunWalletInit(const Context& ctx, const fs::path& path, bool empty) {
  const auto store = wallet::WalletStore::Init(
      empty ? wallet::Fixture::kEmpty : wallet::Fixture::kDemo, path);
  if (ctx.json_output) {
    ctx.out << json{{"path", path.string()},
                    {"credentials", store.credentials().size()}}
                   .dump()
            << "\n";
  } else {
    ctx.out << "Created wallet " << path.string() << " with "
            << store.credentials().size() << " credential(s)\n";
  }
  return kExitOk;
}

int RunWalletList(const Context& ctx, const fs::path& path) {
  const auto store = wallet::WalletStore::Load(path);
  if (ctx.json_output) {
    json list = json::array();
    for (const auto& c : store.credentials()) {
      std::vector<AttributeValue> values;
      for (const auto& s : c.secrets.claims) values.push_back(s.claim);
      list.push_back({{"issuer_id", c.credential.issuer_id},
                      {"expires_at", c.credential.expires_at.ToString()},
                      {"attributes", AttributesToJson(values)}});
    }
    ctx.out << json{{"credentials", list}}.dump() << "\n";
    return kExitOk;
  }
  if (store.credentials().empty()) ctx.out << "No credentials\n";
  for (const auto& c : store.credentials()) {
    ctx.out << "Credential from " << c.credential.issuer_id << ", valid until "
            << c.credential.expires_at.ToString() << "\n";
    for (const auto& s : c.secrets.claims) {
      ctx.out << "  " << AttributeLine(s.claim) << "\n";
    }
  }
  return kExitOk;
}

int RunWalletFlow(const Context& ctx, const fs::path& path,
                  const std::string& qr_text, bool approve, bool yes) {
  const auto store = wallet::WalletStore::Load(path);
  const auto qr = session::QrPayload::Parse(qr_text);
  const auto prompt = wallet::Scan(store, qr);
  if (!approve) {
    if (ctx.json_output) {
      ctx.out << prompt.ToJson().dump() << "\n";
    } else {
      ctx.out << prompt.ToText(store);
    }
    return kExitOk;
  }
  if (!ctx.json_output || !yes) ctx.out << prompt.ToText(store);
  if (!prompt.resolvable) {
    throw Error(ErrorCode::kNotResolvable,
                "wallet lacks requested attributes");
  }
  if (!yes && !ctx.Confirm("Disclose these attributes?")) {
    wallet::Deny(prompt);
    ctx.out << "Declined; nothing was sent.\n";
    return kExitRemote;
  }
  const auto receipt = wallet::Approve(store, prompt);
  if (ctx.json_output) {
    ctx.out << receipt.ToJson().dump() << "\n";
  } else {
    ctx.out << "Disclosed " << receipt.disclosed.size()
            << " attribute(s); the key server issued a certificate.\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- dispatch

// CLI11 wants argc/argv with a program name in front.
void Parse(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("idsign");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  app.parse(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err, std::istream& in) {
  Context ctx{out, err, in};
  CLI::App app{"IdentitySign: sign and verify PDFs with verified identity "
               "attributes"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  bool json_flag = false;
  app.add_flag("--json", json_flag, "Machine-readable output");

  SignArgs sign_args;
  auto* sign = app.add_subcommand("sign", "Sign a PDF with wallet attributes");
  sign->add_option("file", sign_args.file, "PDF to sign")->required();
  sign->add_option("--attrs", sign_args.attrs,
                   "Comma-separated attribute ids or demo names "
                   "(fullName,email)");
  sign->add_option("--request", sign_args.request_token,
                   "Signature request link or token");
  sign->add_option("--server", sign_args.server,
                   "Key server URL (default $IDSIGN_SERVER)");
  sign->add_option("-o,--output", sign_args.output, "Signed output path");
  sign->add_option("--wallet", sign_args.wallet_path,
                   "Drive this wallet-sim store in-process");
  sign->add_flag("--auto-approve", sign_args.auto_approve,
                 "Approve the disclosure without asking");
  sign->add_flag("--json", json_flag, "Machine-readable output");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Verify a signed PDF");
  verify->add_option("file", verify_args.file, "PDF to verify")->required();
  verify->add_option("--trust", verify_args.trust,
                     "JSON file {server_id: public key} (or $IDSIGN_TRUST)");
  verify->add_option("--config", verify_args.config,
                     "Trust the key server configured in this file");
  verify->add_option("--server", verify_args.server,
                     "Fetch trust roots from this key server");
  verify->add_flag("--json", json_flag, "Machine-readable output");

  std::string req_file, req_attrs, req_message, req_base;
  auto* req = app.add_subcommand("request", "Create a signature request link");
  req->add_option("file_name", req_file, "Name of the file to be signed")
      ->required();
  req->add_option("--attrs", req_attrs, "Required attributes")->required();
  auto* req_msg_opt =
      req->add_option("--message", req_message, "Optional note (<= 500 chars)");
  req->add_option("--base-url", req_base, "Link base (default: server URL)");
  req->add_flag("--json", json_flag, "Machine-readable output");

  std::string serve_config, serve_static;
  int serve_port = -1;
  bool serve_quiet = false;
  auto* serve = app.add_subcommand("serve", "Run the key server");
  serve->add_option("--config", serve_config,
                    "Config file (default $IDSIGN_CONFIG or "
                    "~/.idsign/server.json; created if missing)");
  serve->add_option("--port", serve_port, "Listen port (0: any free port)");
  serve->add_option("--static", serve_static, "Directory served at /");
  serve->add_flag("--quiet", serve_quiet, "No access log");
  serve->add_flag("--json", json_flag, "Machine-readable output");

  std::string wallet_path, qr_text;
  bool wallet_empty = false, wallet_yes = false;
  auto* wallet_cmd = app.add_subcommand("wallet", "Simulated identity wallet");
  wallet_cmd->require_subcommand(1);
  wallet_cmd->add_option("--wallet", wallet_path,
                         "Store path (default $IDSIGN_WALLET or "
                         "~/.idsign/wallet.json)");
  wallet_cmd->add_flag("--json", json_flag, "Machine-readable output");
  auto* w_init = wallet_cmd->add_subcommand("init", "Create a wallet store");
  w_init->add_flag("--empty", wallet_empty, "No demo credential");
  auto* w_list = wallet_cmd->add_subcommand("list", "Show credentials");
  auto* w_scan = wallet_cmd->add_subcommand("scan", "Show a request's prompt");
  w_scan->add_option("qr", qr_text, "QR payload JSON or wallet URL")
      ->required();
  auto* w_approve =
      wallet_cmd->add_subcommand("approve", "Scan and disclose");
  w_approve->add_option("qr", qr_text, "QR payload JSON or wallet URL")
      ->required();
  w_approve->add_flag("-y,--yes", wallet_yes, "Do not ask for consent");
  for (auto* sub : {w_init, w_list, w_scan, w_approve}) {
    sub->add_option("--wallet", wallet_path, "Store path");
    sub->add_flag("--json", json_flag, "Machine-readable output");
  }

  std::string extract_file, extract_out;
  auto* extract = app.add_subcommand(
      "extract-original", "Write the signed original bytes of a signed PDF");
  extract->add_option("file", extract_file, "Signed PDF")->required();
  extract->add_option("-o,--output", extract_out, "Output path")->required();
  extract->add_flag("--json", json_flag, "Machine-readable output");

  try {
    Parse(app, args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  ctx.json_output = json_flag;

  try {
    if (sign->parsed()) return RunSign(ctx, sign_args);
    if (verify->parsed()) return RunVerify(ctx, verify_args);
    if (req->parsed()) {
      return RunRequest(ctx, req_file, req_attrs, req_message,
                        req_msg_opt->count() > 0, req_base);
    }
    if (serve->parsed()) {
      return RunServe(ctx, serve_config, serve_port, serve_static,
                      serve_quiet);
    }
    if (wallet_cmd->parsed()) {
      const fs::path path =
          wallet_path.empty() ? wallet::DefaultWalletPath() : fs::path(wallet_path);
      if (w_init->parsed()) return RunWalletInit(ctx, path, wallet_empty);
      if (w_list->parsed()) return RunWalletList(ctx, path);
      if (w_scan->parsed()) {
        return RunWalletFlow(ctx, path, qr_text, false, false);
      }
      return RunWalletFlow(ctx, path, qr_text, true, wallet_yes);
    }
    if (extract->parsed()) {
      const std::string original = pdf::ExtractOriginal(ReadFile(extract_file));
      WriteFile(extract_out, original);
      if (ctx.json_output) {
        out << json{{"output", extract_out},
                    {"original_length", original.size()},
                    {"doc_hash", Digest(original)}}
                   .dump()
            << "\n";
      } else {
        out << "Wrote " << original.size() << " bytes to " << extract_out
            << "\n";
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    return ctx.Fail(e);
  } catch (const std::filesystem::filesystem_error& e) {
    return ctx.Fail(Error(ErrorCode::kIo, e.what()));
  }
  return kExitUsage;
}

}  // namespace idsign::cli
