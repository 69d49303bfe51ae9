#include "idsign/wallet/wallet.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "idsign/canonical.h"
#include "idsign/disclosure/demo_issuer.h"
#include "idsign/error.h"
#include "idsign/session/client.h"

namespace idsign::wallet {

namespace {

constexpr int kStoreVersion = 1;
constexpr std::chrono::hours kDemoValidity{24 * 365};

[[noreturn]] void Corrupt(const std::string& detail) {
  throw Error(ErrorCode::kStoreCorrupt, detail);
}

// Server-side refusals other than an unknown token surface as
// kServerRejected carrying the server's error code.
[[noreturn]] void Rejected(const Error& e) {
  if (e.code() == ErrorCode::kNetworkError ||
      e.code() == ErrorCode::kServerRejected) {
    throw e;
  }
  throw Error(ErrorCode::kServerRejected, std::string(ErrorCodeName(e.code())));
}

}  // namespace

std::filesystem::path DefaultWalletPath() {
  if (const char* env = std::getenv("IDSIGN_WALLET"); env && *env) return env;
  const char* home = std::getenv("HOME");
  return std::filesystem::path(home ? home : ".") / ".idsign" / "wallet.json";
}

WalletStore WalletStore::Init(Fixture fixture,
                              const std::filesystem::path& path,
                              Timestamp now) {
  if (std::filesystem::exists(path)) {
    throw Error(ErrorCode::kStoreExists, path.string());
  }
  WalletStore store;
  store.path_ = path;
  if (fixture == Fixture::kDemo) {
    auto issued = sd::IssueCredential(sd::DemoIssuerKey(), sd::kDemoIssuerId,
                                      sd::DemoClaims(),
                                      {now, now + kDemoValidity});
    store.credentials_.push_back(
        {std::move(issued.credential), std::move(issued.secrets)});
  }
  store.Save();
  return store;
}

WalletStore WalletStore::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read wallet " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) Corrupt("wallet is not JSON");
  if (!j.contains("v") || j["v"] != kStoreVersion) {
    Corrupt("unsupported wallet version");
  }
  if (!j.contains("credentials") || !j["credentials"].is_array()) {
    Corrupt("missing credentials");
  }
  WalletStore store;
  store.path_ = path;
  for (const auto& item : j["credentials"]) {
    if (!item.is_object() || !item.contains("credential") ||
        !item.contains("secrets")) {
      Corrupt("credential entry needs credential and secrets");
    }
    WalletCredential wc;
    try {
      wc.credential = sd::Credential::FromJson(item["credential"]);
      wc.secrets = sd::CredentialSecrets::FromJson(item["secrets"]);
      sd::CheckSecretsConsistent(wc.credential, wc.secrets);
    } catch (const Error& e) {
      Corrupt(e.what());
    }
    store.credentials_.push_back(std::move(wc));
  }
  return store;
}

void WalletStore::Save() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : credentials_) {
    list.push_back({{"credential", c.credential.ToJson()},
                    {"secrets", c.secrets.ToJson()}});
  }
  const CanonicalBytes bytes =
      CanonicalEncode({{"credentials", list}, {"v", kStoreVersion}});
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  out << bytes.view();
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path_.string());
}

void WalletStore::Add(WalletCredential credential) {
  sd::CheckSecretsConsistent(credential.credential, credential.secrets);
  credentials_.push_back(std::move(credential));
}

const WalletCredential* WalletStore::FindCovering(
    const std::vector<AttributeId>& ids) const {
  for (const auto& c : credentials_) {
    if (std::all_of(ids.begin(), ids.end(),
                    [&](const AttributeId& id) { return c.credential.Has(id); })) {
      return &c;
    }
  }
  return nullptr;
}

std::string ConsentPrompt::ToText(const WalletStore& store) const {
  std::ostringstream out;
  out << "IdentitySign signing request\n" << display_hint << "\n";
  out << "Document fingerprint: " << doc_hash << "\n";
  out << "Requested attributes:\n";
  const WalletCredential* cred = store.FindCovering(requested_attributes);
  for (const auto& id : requested_attributes) {
    out << "  " << id.attribute();
    if (cred != nullptr) {
      if (const auto* s = cred->secrets.Find(id)) {
        out << ": " << s->claim.value();
      }
    }
    out << "\n";
  }
  if (!resolvable) {
    out << "This wallet cannot provide:";
    for (const auto& id : missing) out << " " << id.Render();
    out << "\n";
  }
  return out.str();
}

nlohmann::json ConsentPrompt::ToJson() const {
  nlohmann::json req = nlohmann::json::array();
  for (const auto& id : requested_attributes) req.push_back(id.Render());
  nlohmann::json miss = nlohmann::json::array();
  for (const auto& id : missing) miss.push_back(id.Render());
  return {{"wallet_url", wallet_url},   {"requested_attributes", req},
          {"doc_hash", doc_hash},       {"display_hint", display_hint},
          {"resolvable", resolvable},   {"missing", miss}};
}

nlohmann::json DisclosureReceipt::ToJson() const {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& id : disclosed) ids.push_back(id.Render());
  return {{"cert", cert.ToJson()}, {"disclosed", ids}};
}

ConsentPrompt Scan(const WalletStore& store, const session::QrPayload& qr) {
  session::HttpResult r = session::HttpCall("GET", qr.u);
  session::WalletRequest req;
  try {
    session::ThrowIfFailed(r);
    req = session::WalletRequest::FromJson(nlohmann::json::parse(r.body));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnknownToken) throw;
    Rejected(e);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kServerRejected, e.what());
  }

  ConsentPrompt p;
  p.wallet_url = qr.u;
  p.requested_attributes = req.requested_attributes;
  p.doc_hash = req.doc_hash;
  p.display_hint = req.display_hint;
  p.resolvable = store.FindCovering(p.requested_attributes) != nullptr;
  if (!p.resolvable) {
    for (const auto& id : p.requested_attributes) {
      const bool held = std::any_of(
          store.credentials().begin(), store.credentials().end(),
          [&](const WalletCredential& c) { return c.credential.Has(id); });
      if (!held) p.missing.push_back(id);
    }
  }
  return p;
}

sd::Disclosure BuildDisclosure(const WalletStore& store,
                               const ConsentPrompt& prompt) {
  const WalletCredential* cred = store.FindCovering(prompt.requested_attributes);
  if (cred == nullptr || prompt.requested_attributes.empty()) {
    throw Error(ErrorCode::kNotResolvable,
                "no single credential holds every requested attribute");
  }
  return sd::MakeDisclosure(cred->credential, cred->secrets,
                            prompt.requested_attributes);
}

DisclosureReceipt Approve(const WalletStore& store,
                          const ConsentPrompt& prompt) {
  if (!prompt.resolvable) {
    throw Error(ErrorCode::kNotResolvable, "request cannot be satisfied");
  }
  const sd::Disclosure d = BuildDisclosure(store, prompt);
  const session::HttpResult r = session::HttpCall(
      "POST", prompt.wallet_url + "/disclose", d.ToJson().dump());
  DisclosureReceipt receipt;
  try {
    session::ThrowIfFailed(r);
    const auto j = nlohmann::json::parse(r.body);
    receipt.cert = sig::AttributeCertificate::FromJson(j.at("cert"));
  } catch (const Error& e) {
    Rejected(e);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kServerRejected, e.what());
  }
  receipt.disclosed = prompt.requested_attributes;
  return receipt;
}

void Deny(const ConsentPrompt&) {}

}  // namespace idsign::wallet
