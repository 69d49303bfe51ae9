#ifndef IDSIGN_SESSION_STORE_H_
#define IDSIGN_SESSION_STORE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idsign/session/session.h"

namespace idsign::session {

// Storage behind SessionService. Implementations need not be thread-safe;
// the service serializes every access.
class SessionStore {
 public:
  virtual ~SessionStore() = default;

  virtual void Put(const SessionRecord& record) = 0;
  virtual std::optional<SessionRecord> Get(const std::string& id) const = 0;
  virtual std::optional<SessionRecord> FindByWalletToken(
      const std::string& token) const = 0;
  virtual std::vector<std::string> Ids() const = 0;
  virtual void Erase(const std::string& id) = 0;
};

class MemorySessionStore : public SessionStore {
 public:
  void Put(const SessionRecord& record) override;
  std::optional<SessionRecord> Get(const std::string& id) const override;
  std::optional<SessionRecord> FindByWalletToken(
      const std::string& token) const override;
  std::vector<std::string> Ids() const override;
  void Erase(const std::string& id) override;

 private:
  std::map<std::string, SessionRecord> records_;
  std::map<std::string, std::string> by_wallet_token_;
};

// Memory store mirrored to a JSON file that is rewritten (write to a
// temporary file, then rename) after every change. Existing sessions are
// loaded on construction; throws Error(kIo) if the file is unreadable.
class FileSessionStore : public SessionStore {
 public:
  explicit FileSessionStore(std::filesystem::path path);

  void Put(const SessionRecord& record) override;
  std::optional<SessionRecord> Get(const std::string& id) const override;
  std::optional<SessionRecord> FindByWalletToken(
      const std::string& token) const override;
  std::vector<std::string> Ids() const override;
  void Erase(const std::string& id) override;

 private:
  void Flush() const;

  std::filesystem::path path_;
  MemorySessionStore memory_;
};

}  // namespace idsign::session

#endif  // IDSIGN_SESSION_STORE_H_
