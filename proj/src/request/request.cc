#include "idsign/request/request.h"

#include <algorithm>

#include "idsign/canonical.h"
#include "idsign/crypto.h"
#include "idsign/error.h"

namespace idsign::request {

namespace {

[[noreturn]] void Invalid(const std::string& detail) {
  throw Error(ErrorCode::kInvalidSpec, detail);
}

[[noreturn]] void Malformed(const std::string& detail) {
  throw Error(ErrorCode::kMalformedToken, detail);
}

bool IsNfc(std::string_view s) {
  try {
    return NormalizeNfc(s) == s;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

RequestSpec RequestSpec::Make(std::string_view file_name,
                              std::vector<AttributeId> attributes,
                              std::optional<std::string_view> message) {
  RequestSpec spec;
  try {
    spec.file_name = NormalizeNfc(file_name);
    if (message) spec.message = NormalizeNfc(*message);
    spec.required_attributes = SortedUnique(std::move(attributes));
  } catch (const Error& e) {
    Invalid(e.what());
  }
  spec.Validate();
  return spec;
}

void RequestSpec::Validate() const {
  if (file_name.empty()) Invalid("file_name is empty");
  if (!IsNfc(file_name)) Invalid("file_name is not NFC UTF-8");
  if (file_name.find_first_of("/\\") != std::string::npos) {
    Invalid("file_name contains a path separator");
  }
  if (file_name.find('\0') != std::string::npos) {
    Invalid("file_name contains NUL");
  }
  if (file_name == "." || file_name == "..") Invalid("file_name is a path");
  if (required_attributes.empty()) Invalid("required_attributes is empty");
  for (std::size_t i = 1; i < required_attributes.size(); ++i) {
    if (!(required_attributes[i - 1] < required_attributes[i])) {
      Invalid("required_attributes not sorted and unique");
    }
  }
  if (message) {
    if (!IsNfc(*message)) Invalid("message is not NFC UTF-8");
    if (CodePointCount(*message) > kMaxMessageChars) {
      Invalid("message longer than 500 characters");
    }
  }
}

nlohmann::json RequestSpec::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  j["v"] = kRequestVersion;
  j["file_name"] = file_name;
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& id : required_attributes) ids.push_back(id.Render());
  j["required_attributes"] = std::move(ids);
  if (message) j["message"] = *message;
  return j;
}

std::string EncodeRequest(const RequestSpec& spec, std::string_view base_url) {
  spec.Validate();
  while (!base_url.empty() && base_url.back() == '/') {
    base_url.remove_suffix(1);
  }
  const CanonicalBytes bytes = CanonicalEncode(spec.ToJson());
  return std::string(base_url) + "/sign#" + Base64UrlEncode(bytes.view());
}

RequestSpec DecodeRequest(std::string_view token) {
  if (const auto hash = token.rfind('#'); hash != std::string_view::npos) {
    token = token.substr(hash + 1);
  }
  if (token.empty()) Malformed("empty token");

  nlohmann::json j;
  try {
    j = ParseCanonical(Base64UrlDecodeToString(token));
  } catch (const Error& e) {
    Malformed(e.what());
  }
  if (!j.is_object()) Malformed("token is not an object");
  const auto v = j.find("v");
  if (v == j.end() || !v->is_number_integer()) Malformed("missing version");
  if (v->get<std::int64_t>() != kRequestVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "request version " + std::to_string(v->get<std::int64_t>()));
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "v" && key != "file_name" && key != "required_attributes" &&
        key != "message") {
      Malformed("unknown field " + key);
    }
  }
  const auto name = j.find("file_name");
  const auto attrs = j.find("required_attributes");
  if (name == j.end() || !name->is_string()) Malformed("missing file_name");
  if (attrs == j.end() || !attrs->is_array()) {
    Malformed("missing required_attributes");
  }

  RequestSpec spec;
  spec.file_name = name->get<std::string>();
  for (const auto& id : *attrs) {
    if (!id.is_string()) Malformed("attribute id is not a string");
    try {
      spec.required_attributes.push_back(
          AttributeId::Parse(id.get<std::string>()));
    } catch (const Error& e) {
      Malformed(e.what());
    }
  }
  if (const auto msg = j.find("message"); msg != j.end()) {
    if (!msg->is_string()) Malformed("message is not a string");
    spec.message = msg->get<std::string>();
  }
  spec.Validate();
  return spec;
}

std::string_view ViolationCodeName(ViolationCode code) {
  switch (code) {
    case ViolationCode::kFileNameMismatch:
      return "FILE_NAME_MISMATCH";
    case ViolationCode::kMissingAttribute:
      return "MISSING_ATTRIBUTE";
  }
  return "UNKNOWN";
}

std::string Violation::ToString() const {
  std::string s(ViolationCodeName(code));
  if (attribute) s += " " + attribute->Render();
  return s;
}

nlohmann::json Violation::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  j["code"] = std::string(ViolationCodeName(code));
  if (attribute) j["attribute"] = attribute->Render();
  return j;
}

std::vector<Violation> ValidateAgainstRequest(
    const RequestSpec& spec, std::string_view selected_file_name,
    const std::vector<AttributeId>& selected_attributes) {
  std::vector<Violation> out;
  std::string selected(selected_file_name);
  try {
    selected = NormalizeNfc(selected);
  } catch (const Error&) {
  }
  if (selected != spec.file_name) {
    out.push_back({ViolationCode::kFileNameMismatch, std::nullopt});
  }
  for (const auto& id : spec.required_attributes) {
    if (std::find(selected_attributes.begin(), selected_attributes.end(),
                  id) == selected_attributes.end()) {
      out.push_back({ViolationCode::kMissingAttribute, id});
    }
  }
  return out;
}

std::string ShareMessage(const RequestSpec& spec, std::string_view url) {
  return "Please sign " + spec.file_name + " with IdentitySign: " +
         std::string(url);
}

}  // namespace idsign::request
