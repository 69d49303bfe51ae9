#ifndef IDSIGN_WALLET_WALLET_H_
#define IDSIGN_WALLET_WALLET_H_

#include <filesystem>
#include <string>
#include <vector>

#include "idsign/disclosure/credential.h"
#include "idsign/session/session.h"
#include "idsign/signature/engine.h"

// Scriptable stand-in for an identity wallet app: holds credentials and
// their secrets, answers QR-initiated disclosure requests.
namespace idsign::wallet {

struct WalletCredential {
  sd::Credential credential;
  sd::CredentialSecrets secrets;
  bool operator==(const WalletCredential&) const = default;
};

enum class Fixture { kDemo, kEmpty };

// Persisted as one canonical-JSON file:
//   {"credentials":[{"credential":{...},"secrets":[...]}],"v":1}
class WalletStore {
 public:
  // Throws Error(kStoreExists) if |path| exists. The demo fixture holds one
  // credential from the bundled demo issuer, valid for a year from |now|.
  static WalletStore Init(Fixture fixture, const std::filesystem::path& path,
                          Timestamp now = Timestamp::Now());
  // Throws Error(kIo) when unreadable, Error(kStoreCorrupt) when malformed
  // or when secrets do not reproduce the commitments.
  static WalletStore Load(const std::filesystem::path& path);

  void Save() const;
  void Add(WalletCredential credential);

  const std::vector<WalletCredential>& credentials() const {
    return credentials_;
  }
  const std::filesystem::path& path() const { return path_; }

  // The credential holding every id in |ids|, or nullptr.
  const WalletCredential* FindCovering(const std::vector<AttributeId>& ids) const;

 private:
  std::filesystem::path path_;
  std::vector<WalletCredential> credentials_;
};

// IDSIGN_WALLET, else ~/.idsign/wallet.json.
std::filesystem::path DefaultWalletPath();

struct ConsentPrompt {
  std::string wallet_url;
  std::vector<AttributeId> requested_attributes;
  std::string doc_hash;
  std::string display_hint;
  bool resolvable = false;
  std::vector<AttributeId> missing;

  // Multi-line text shown before asking for consent.
  std::string ToText(const WalletStore& store) const;
  nlohmann::json ToJson() const;
};

struct DisclosureReceipt {
  sig::AttributeCertificate cert;
  std::vector<AttributeId> disclosed;
  nlohmann::json ToJson() const;
};

// Fetches the session behind |qr| (moving it to WALLET_CONNECTED). Throws
// Error(kNetworkError), Error(kUnknownToken), Error(kServerRejected).
ConsentPrompt Scan(const WalletStore& store, const session::QrPayload& qr);

// The disclosure Approve would send: only the requested claims.
// Throws Error(kNotResolvable).
sd::Disclosure BuildDisclosure(const WalletStore& store,
                               const ConsentPrompt& prompt);

// Posts the disclosure. Throws Error(kNotResolvable), Error(kNetworkError),
// Error(kServerRejected) whose detail is the server's error code.
DisclosureReceipt Approve(const WalletStore& store,
                          const ConsentPrompt& prompt);

// Declines locally. Nothing is sent; the session runs into its expiry.
void Deny(const ConsentPrompt& prompt);

}  // namespace idsign::wallet

#endif  // IDSIGN_WALLET_WALLET_H_
