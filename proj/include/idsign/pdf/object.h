#ifndef IDSIGN_PDF_OBJECT_H_
#define IDSIGN_PDF_OBJECT_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

// In-memory PDF object model, enough to read cross-reference data and page
// trees and to write rewritten page dictionaries back out.
namespace idsign::pdf {

struct Null {
  bool operator==(const Null&) const = default;
};

struct Ref {
  int num = 0;
  int gen = 0;
  auto operator<=>(const Ref&) const = default;
};

struct Name {
  std::string value;  // decoded, without the leading slash
  bool operator==(const Name&) const = default;
};

struct String {
  std::string bytes;  // decoded
  bool hex = false;
  bool operator==(const String&) const = default;
};

// Reals keep their source text so rewritten objects reproduce it exactly.
struct Real {
  std::string text;
  double value() const;
  bool operator==(const Real&) const = default;
};

class Object;
using Array = std::vector<Object>;

// Insertion-ordered dictionary.
class Dict {
 public:
  const Object* Get(std::string_view key) const;
  Object* GetMutable(std::string_view key);
  void Set(std::string key, Object value);
  bool Erase(std::string_view key);
  bool Contains(std::string_view key) const { return Get(key) != nullptr; }

  std::size_t size() const { return keys_.size(); }
  const std::string& key_at(std::size_t i) const { return keys_[i]; }
  const Object& value_at(std::size_t i) const;

  bool operator==(const Dict& other) const;

 private:
  std::vector<std::string> keys_;
  std::vector<Object> values_;
};

class Object {
 public:
  using Value = std::variant<Null, bool, std::int64_t, Real, String, Name,
                             Array, Dict, Ref>;

  Object() = default;
  template <typename T,
            typename = std::enable_if_t<std::is_constructible_v<Value, T&&> &&
                                        !std::is_same_v<std::decay_t<T>, int>>>
  Object(T&& v) : value_(std::forward<T>(v)) {}
  Object(int v) : value_(static_cast<std::int64_t>(v)) {}

  bool is_null() const { return std::holds_alternative<Null>(value_); }
  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(value_); }
  bool is_real() const { return std::holds_alternative<Real>(value_); }
  bool is_number() const { return is_int() || is_real(); }
  bool is_string() const { return std::holds_alternative<String>(value_); }
  bool is_name() const { return std::holds_alternative<Name>(value_); }
  bool is_array() const { return std::holds_alternative<Array>(value_); }
  bool is_dict() const { return std::holds_alternative<Dict>(value_); }
  bool is_ref() const { return std::holds_alternative<Ref>(value_); }

  bool as_bool() const { return std::get<bool>(value_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  double as_number() const;
  const String& as_string() const { return std::get<String>(value_); }
  const Name& as_name() const { return std::get<Name>(value_); }
  const Array& as_array() const { return std::get<Array>(value_); }
  Array& as_array() { return std::get<Array>(value_); }
  const Dict& as_dict() const { return std::get<Dict>(value_); }
  Dict& as_dict() { return std::get<Dict>(value_); }
  Ref as_ref() const { return std::get<Ref>(value_); }

  bool IsName(std::string_view n) const {
    return is_name() && as_name().value == n;
  }

  const Value& value() const { return value_; }
  bool operator==(const Object& other) const { return value_ == other.value_; }

 private:
  Value value_;
};

// A stream as stored in the file: dictionary plus still-encoded data.
struct Stream {
  Dict dict;
  std::string data;
};

struct IndirectObject {
  Ref ref;
  Object object;
  std::optional<Stream> stream;  // set when the object is a stream
};

// Serializes |obj| in PDF syntax, appending to |out|.
void WriteObject(const Object& obj, std::string& out);
std::string ToPdfString(const Object& obj);

}  // namespace idsign::pdf

#endif  // IDSIGN_PDF_OBJECT_H_
