#ifndef IDSIGN_REQUEST_REQUEST_H_
#define IDSIGN_REQUEST_REQUEST_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idsign/attribute.h"
#include "json.hpp"

// Signature requests travel as a URL fragment,
//   <base_url>/sign#<base64url(canonical JSON)>
// so the token is never sent to a server. The requester shares the file
// separately; the request binds only its name.
namespace idsign::request {

inline constexpr int kRequestVersion = 1;
inline constexpr std::size_t kMaxMessageChars = 500;

struct RequestSpec {
  std::string file_name;
  std::vector<AttributeId> required_attributes;  // sorted, unique, non-empty
  std::optional<std::string> message;

  // NFC-normalizes the strings and sorts the attributes. Throws
  // Error(kInvalidSpec).
  static RequestSpec Make(std::string_view file_name,
                          std::vector<AttributeId> attributes,
                          std::optional<std::string_view> message = {});

  // Throws Error(kInvalidSpec) naming the first broken invariant.
  void Validate() const;

  nlohmann::json ToJson() const;
  bool operator==(const RequestSpec&) const = default;
};

// Throws Error(kInvalidSpec).
std::string EncodeRequest(const RequestSpec& spec, std::string_view base_url);

// Accepts the bare token or a full request URL. Throws Error(kMalformedToken),
// Error(kUnsupportedVersion) or Error(kInvalidSpec).
RequestSpec DecodeRequest(std::string_view token_or_url);

enum class ViolationCode { kFileNameMismatch, kMissingAttribute };

struct Violation {
  ViolationCode code;
  std::optional<AttributeId> attribute;  // kMissingAttribute only

  // "FILE_NAME_MISMATCH" or "MISSING_ATTRIBUTE <id>".
  std::string ToString() const;
  nlohmann::json ToJson() const;
  bool operator==(const Violation&) const = default;
};

std::string_view ViolationCodeName(ViolationCode code);

// Empty when the selection satisfies the request. Extra attributes are
// allowed.
std::vector<Violation> ValidateAgainstRequest(
    const RequestSpec& spec, std::string_view selected_file_name,
    const std::vector<AttributeId>& selected_attributes);

// "Please sign <file_name> with IdentitySign: <url>"
std::string ShareMessage(const RequestSpec& spec, std::string_view url);

}  // namespace idsign::request

#endif  // IDSIGN_REQUEST_REQUEST_H_
