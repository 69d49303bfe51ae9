#ifndef IDSIGN_CANONICAL_H_
#define IDSIGN_CANONICAL_H_

#include <string>
#include <string_view>

#include "json.hpp"

namespace idsign {

// Bytes produced by CanonicalEncode and nothing else.
class CanonicalBytes {
 public:
  const std::string& bytes() const { return bytes_; }
  std::string_view view() const { return bytes_; }
  std::size_t size() const { return bytes_.size(); }

  bool operator==(const CanonicalBytes&) const = default;

 private:
  friend CanonicalBytes CanonicalEncode(const nlohmann::json& value);
  explicit CanonicalBytes(std::string bytes) : bytes_(std::move(bytes)) {}

  std::string bytes_;
};

// Sorted-key, whitespace-free UTF-8 JSON with every string (keys included)
// in NFC. Accepts strings, integers, arrays and objects only; anything else
// throws Error(kNonCanonicalizable).
CanonicalBytes CanonicalEncode(const nlohmann::json& value);

// Parses |bytes| and requires them to already be in canonical form.
// Throws Error(kNonCanonicalizable) otherwise.
nlohmann::json ParseCanonical(std::string_view bytes);

// NFC-normalizes UTF-8 text. Throws Error(kBadEncoding) on invalid UTF-8.
std::string NormalizeNfc(std::string_view utf8);

// Number of Unicode code points in valid UTF-8 text.
std::size_t CodePointCount(std::string_view utf8);

}  // namespace idsign

#endif  // IDSIGN_CANONICAL_H_
