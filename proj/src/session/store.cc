#include "idsign/session/store.h"

#include <fstream>
#include <sstream>

#include "idsign/error.h"

namespace idsign::session {

void MemorySessionStore::Put(const SessionRecord& record) {
  if (const auto it = records_.find(record.session_id); it != records_.end()) {
    by_wallet_token_.erase(it->second.wallet_token);
  }
  records_[record.session_id] = record;
  by_wallet_token_[record.wallet_token] = record.session_id;
}

std::optional<SessionRecord> MemorySessionStore::Get(
    const std::string& id) const {
  const auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::optional<SessionRecord> MemorySessionStore::FindByWalletToken(
    const std::string& token) const {
  const auto it = by_wallet_token_.find(token);
  if (it == by_wallet_token_.end()) return std::nullopt;
  return Get(it->second);
}

std::vector<std::string> MemorySessionStore::Ids() const {
  std::vector<std::string> ids;
  ids.reserve(records_.size());
  for (const auto& [id, _] : records_) ids.push_back(id);
  return ids;
}

void MemorySessionStore::Erase(const std::string& id) {
  const auto it = records_.find(id);
  if (it == records_.end()) return;
  by_wallet_token_.erase(it->second.wallet_token);
  records_.erase(it);
}

FileSessionStore::FileSessionStore(std::filesystem::path path)
    : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::stringstream buf;
  buf << in.rdbuf();
  const auto j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    throw Error(ErrorCode::kIo, "session store is not a JSON array: " +
                                    path_.string());
  }
  for (const auto& item : j) memory_.Put(SessionRecord::FromJson(item));
}

void FileSessionStore::Put(const SessionRecord& record) {
  memory_.Put(record);
  Flush();
}

std::optional<SessionRecord> FileSessionStore::Get(
    const std::string& id) const {
  return memory_.Get(id);
}

std::optional<SessionRecord> FileSessionStore::FindByWalletToken(
    const std::string& token) const {
  return memory_.FindByWalletToken(token);
}

std::vector<std::string> FileSessionStore::Ids() const { return memory_.Ids(); }

void FileSessionStore::Erase(const std::string& id) {
  memory_.Erase(id);
  Flush();
}

void FileSessionStore::Flush() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& id : memory_.Ids()) j.push_back(memory_.Get(id)->ToJson());
  const std::filesystem::path tmp = path_.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump();
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot replace " + path_.string());
}

}  // namespace idsign::session
