#include "idsign/attribute.h"

#include <algorithm>

#include "idsign/canonical.h"
#include "idsign/error.h"

namespace idsign {

namespace {

bool IsSegmentChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '-';
}

bool IsValidSegment(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), IsSegmentChar);
}

}  // namespace

AttributeId::AttributeId(std::string scheme, std::string issuer,
                         std::string credential, std::string attribute)
    : scheme_(std::move(scheme)),
      issuer_(std::move(issuer)),
      credential_(std::move(credential)),
      attribute_(std::move(attribute)) {
  for (const auto* seg : {&scheme_, &issuer_, &credential_, &attribute_}) {
    if (!IsValidSegment(*seg)) {
      throw Error(ErrorCode::kMalformedAttributeId,
                  "invalid segment '" + *seg + "'");
    }
  }
}

AttributeId AttributeId::Parse(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    parts.emplace_back(text.substr(start, dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (parts.size() != 4) {
    throw Error(ErrorCode::kMalformedAttributeId,
                "expected 4 segments in '" + std::string(text) + "'");
  }
  return AttributeId(parts[0], parts[1], parts[2], parts[3]);
}

std::string AttributeId::Render() const {
  return scheme_ + "." + issuer_ + "." + credential_ + "." + attribute_;
}

std::strong_ordering AttributeId::operator<=>(const AttributeId& other) const {
  const int c = Render().compare(other.Render());
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool AttributeId::operator==(const AttributeId& other) const {
  return scheme_ == other.scheme_ && issuer_ == other.issuer_ &&
         credential_ == other.credential_ && attribute_ == other.attribute_;
}

AttributeValue::AttributeValue(AttributeId id, std::string_view value)
    : id_(std::move(id)) {
  try {
    value_ = NormalizeNfc(value);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidAttributeValue, e.detail());
  }
  if (value_.size() > kMaxAttributeValueBytes) {
    throw Error(ErrorCode::kInvalidAttributeValue,
                "value of " + id_.Render() + " exceeds 4096 bytes");
  }
}

nlohmann::json AttributeValue::ToJson() const {
  return {{"id", id_.Render()}, {"value", value_}};
}

AttributeValue AttributeValue::FromJson(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 2 || !j.contains("id") ||
      !j.contains("value") || !j["id"].is_string() ||
      !j["value"].is_string()) {
    throw Error(ErrorCode::kInvalidAttributeValue, "expected {id, value}");
  }
  return AttributeValue(AttributeId::Parse(j["id"].get<std::string>()),
                        j["value"].get<std::string>());
}

std::vector<AttributeValue> SortedUnique(std::vector<AttributeValue> values) {
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return a.id() < b.id(); });
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i].id() == values[i - 1].id()) {
      throw Error(ErrorCode::kDuplicateAttribute, values[i].id().Render());
    }
  }
  return values;
}

std::vector<AttributeId> SortedUnique(std::vector<AttributeId> ids) {
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i] == ids[i - 1]) {
      throw Error(ErrorCode::kDuplicateAttribute, ids[i].Render());
    }
  }
  return ids;
}

bool IsSortedUnique(const std::vector<AttributeValue>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i - 1].id() < values[i].id())) return false;
  }
  return true;
}

nlohmann::json AttributesToJson(const std::vector<AttributeValue>& values) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : values) out.push_back(v.ToJson());
  return out;
}

std::vector<AttributeValue> AttributesFromJson(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kInvalidAttributeValue, "expected a list");
  }
  std::vector<AttributeValue> out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(AttributeValue::FromJson(item));
  return out;
}

}  // namespace idsign
