#ifndef IDSIGN_ATTRIBUTE_H_
#define IDSIGN_ATTRIBUTE_H_

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace idsign {

// Four-segment dotted attribute path, "scheme.issuer.credential.attribute".
// Each segment matches [a-zA-Z0-9_-]+.
class AttributeId {
 public:
  AttributeId() = default;
  AttributeId(std::string scheme, std::string issuer, std::string credential,
              std::string attribute);

  // Throws Error(kMalformedAttributeId).
  static AttributeId Parse(std::string_view text);

  std::string Render() const;

  const std::string& scheme() const { return scheme_; }
  const std::string& issuer() const { return issuer_; }
  const std::string& credential() const { return credential_; }
  const std::string& attribute() const { return attribute_; }

  // Ordering is by rendered form, which is what every sorted list in the
  // signed structures uses.
  std::strong_ordering operator<=>(const AttributeId& other) const;
  bool operator==(const AttributeId& other) const;

 private:
  std::string scheme_;
  std::string issuer_;
  std::string credential_;
  std::string attribute_;
};

inline constexpr std::size_t kMaxAttributeValueBytes = 4096;

// An attribute together with its (NFC-normalized) UTF-8 value.
class AttributeValue {
 public:
  AttributeValue() = default;
  // Normalizes |value| to NFC. Throws Error(kInvalidAttributeValue) for
  // invalid UTF-8 or values longer than kMaxAttributeValueBytes.
  AttributeValue(AttributeId id, std::string_view value);

  const AttributeId& id() const { return id_; }
  const std::string& value() const { return value_; }

  nlohmann::json ToJson() const;
  static AttributeValue FromJson(const nlohmann::json& j);

  bool operator==(const AttributeValue&) const = default;

 private:
  AttributeId id_;
  std::string value_;
};

// Sorts by rendered id. Throws Error(kDuplicateAttribute) on repeated ids.
std::vector<AttributeValue> SortedUnique(std::vector<AttributeValue> values);
std::vector<AttributeId> SortedUnique(std::vector<AttributeId> ids);

bool IsSortedUnique(const std::vector<AttributeValue>& values);

nlohmann::json AttributesToJson(const std::vector<AttributeValue>& values);
std::vector<AttributeValue> AttributesFromJson(const nlohmann::json& j);

}  // namespace idsign

#endif  // IDSIGN_ATTRIBUTE_H_
