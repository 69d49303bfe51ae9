#include "idsign/session/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "idsign/disclosure/demo_issuer.h"
#include "idsign/error.h"

namespace idsign::session {

namespace {

[[noreturn]] void Bad(const std::string& detail) {
  throw Error(ErrorCode::kConfig, detail);
}

std::string OptString(const nlohmann::json& j, const char* key,
                      std::string fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) Bad(std::string(key) + " must be a string");
  return it->get<std::string>();
}

int ParsePort(const std::string& text) {
  try {
    std::size_t used = 0;
    const int port = std::stoi(text, &used);
    if (used == text.size() && port >= 0 && port <= 65535) return port;
  } catch (const std::exception&) {
  }
  Bad("invalid port " + text);
}

}  // namespace

std::filesystem::path DefaultConfigPath() {
  if (const char* env = std::getenv("IDSIGN_CONFIG"); env && *env) return env;
  const char* home = std::getenv("HOME");
  return std::filesystem::path(home ? home : ".") / ".idsign" / "server.json";
}

ServerConfig ServerConfig::LoadOrCreate(const std::filesystem::path& path) {
  ServerConfig c;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    c.server_key = SigningKey::Generate();
    c.issuers[sd::kDemoIssuerId] = sd::DemoIssuerKey().public_key();
    c.Save(path);
    return c;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const auto j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) Bad(path.string() + " is not JSON");

  c.server_id = OptString(j, "server_id", c.server_id);
  if (c.server_id.empty()) Bad("server_id is empty");
  if (const auto it = j.find("listen"); it != j.end()) {
    if (!it->is_object()) Bad("listen must be an object");
    c.listen_host = OptString(*it, "host", c.listen_host);
    if (const auto p = it->find("port"); p != it->end()) {
      if (!p->is_number_integer()) Bad("listen.port must be an integer");
      c.listen_port = ParsePort(std::to_string(p->get<std::int64_t>()));
    }
  }
  c.base_url = OptString(j, "base_url", "");
  c.verify_hint = OptString(j, "verify_hint", "");
  c.static_dir = OptString(j, "static_dir", "");
  c.session_store = OptString(j, "session_store", "");
  if (const auto it = j.find("issuers"); it != j.end()) {
    if (!it->is_object()) Bad("issuers must be an object");
    for (const auto& [id, key] : it->items()) {
      if (!key.is_string()) Bad("issuer key must be a string");
      try {
        c.issuers[id] = PublicKey::FromBase64Url(key.get<std::string>());
      } catch (const Error& e) {
        Bad("issuer " + id + ": " + e.what());
      }
    }
  }
  const std::string seed = OptString(j, "server_key_seed", "");
  if (seed.empty()) {
    c.server_key = SigningKey::Generate();
    c.Save(path);
  } else {
    try {
      c.server_key = SigningKey::FromSeedBase64Url(seed);
    } catch (const Error& e) {
      Bad(std::string("server_key_seed: ") + e.what());
    }
  }
  return c;
}

void ServerConfig::ApplyEnvironment() {
  if (const char* port = std::getenv("IDSIGN_LISTEN_PORT"); port && *port) {
    listen_port = ParsePort(port);
  }
  if (const char* url = std::getenv("IDSIGN_BASE_URL"); url && *url) {
    base_url = url;
  }
  if (base_url.empty()) {
    base_url = "http://" + listen_host + ":" + std::to_string(listen_port);
  }
  while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
  if (verify_hint.empty()) {
    verify_hint = "Verify at " + base_url + "/ or run: idsign verify <file>";
  }
}

nlohmann::json ServerConfig::ToJson() const {
  nlohmann::json issuers_json = nlohmann::json::object();
  for (const auto& [id, key] : issuers) issuers_json[id] = key.ToBase64Url();
  nlohmann::json j = nlohmann::json::object();
  j["server_id"] = server_id;
  j["listen"] = {{"host", listen_host}, {"port", listen_port}};
  j["base_url"] = base_url;
  j["server_key_seed"] = server_key.SeedBase64Url();
  j["issuers"] = std::move(issuers_json);
  j["verify_hint"] = verify_hint;
  j["static_dir"] = static_dir;
  j["session_store"] = session_store;
  return j;
}

void ServerConfig::Save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << ToJson().dump(2) << "\n";
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
  std::filesystem::permissions(path,
                               std::filesystem::perms::owner_read |
                                   std::filesystem::perms::owner_write,
                               std::filesystem::perm_options::replace);
}

sig::TrustRoots ServerConfig::trust_roots() const {
  return {{server_id, server_key.public_key()}};
}

}  // namespace idsign::session
