#include "idsign/pdf/object.h"

#include <cstdio>
#include <cstdlib>

namespace idsign::pdf {

namespace {

bool IsRegularNameChar(unsigned char c) {
  if (c < 0x21 || c > 0x7E) return false;
  switch (c) {
    case '(': case ')': case '<': case '>': case '[': case ']':
    case '{': case '}': case '/': case '%': case '#':
      return false;
    default:
      return true;
  }
}

void WriteName(const std::string& name, std::string& out) {
  out += '/';
  for (unsigned char c : name) {
    if (IsRegularNameChar(c)) {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "#%02X", c);
      out += buf;
    }
  }
}

void WriteString(const String& s, std::string& out) {
  bool printable = !s.hex;
  for (unsigned char c : s.bytes) {
    if (c < 0x20 || c > 0x7E) {
      printable = false;
      break;
    }
  }
  if (printable) {
    out += '(';
    for (char c : s.bytes) {
      if (c == '(' || c == ')' || c == '\\') out += '\\';
      out += c;
    }
    out += ')';
    return;
  }
  static constexpr char kHex[] = "0123456789ABCDEF";
  out += '<';
  for (unsigned char c : s.bytes) {
    out += kHex[c >> 4];
    out += kHex[c & 0xF];
  }
  out += '>';
}

}  // namespace

double Real::value() const { return std::strtod(text.c_str(), nullptr); }

const Object* Dict::Get(std::string_view key) const {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return &values_[i];
  }
  return nullptr;
}

Object* Dict::GetMutable(std::string_view key) {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return &values_[i];
  }
  return nullptr;
}

void Dict::Set(std::string key, Object value) {
  if (Object* existing = GetMutable(key)) {
    *existing = std::move(value);
    return;
  }
  keys_.push_back(std::move(key));
  values_.push_back(std::move(value));
}

bool Dict::Erase(std::string_view key) {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) {
      keys_.erase(keys_.begin() + static_cast<std::ptrdiff_t>(i));
      values_.erase(values_.begin() + static_cast<std::ptrdiff_t>(i));
      return true;
    }
  }
  return false;
}

const Object& Dict::value_at(std::size_t i) const { return values_[i]; }

bool Dict::operator==(const Dict& other) const {
  return keys_ == other.keys_ && values_ == other.values_;
}

double Object::as_number() const {
  if (is_int()) return static_cast<double>(as_int());
  return std::get<Real>(value_).value();
}

void WriteObject(const Object& obj, std::string& out) {
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Null>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          out += v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          out += std::to_string(v);
        } else if constexpr (std::is_same_v<T, Real>) {
          out += v.text;
        } else if constexpr (std::is_same_v<T, String>) {
          WriteString(v, out);
        } else if constexpr (std::is_same_v<T, Name>) {
          WriteName(v.value, out);
        } else if constexpr (std::is_same_v<T, Array>) {
          out += '[';
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ' ';
            WriteObject(v[i], out);
          }
          out += ']';
        } else if constexpr (std::is_same_v<T, Dict>) {
          out += "<<";
          for (std::size_t i = 0; i < v.size(); ++i) {
            out += ' ';
            WriteName(v.key_at(i), out);
            out += ' ';
            WriteObject(v.value_at(i), out);
          }
          out += " >>";
        } else if constexpr (std::is_same_v<T, Ref>) {
          out += std::to_string(v.num) + ' ' + std::to_string(v.gen) + " R";
        }
      },
      obj.value());
}

std::string ToPdfString(const Object& obj) {
  std::string out;
  WriteObject(obj, out);
  return out;
}

}  // namespace idsign::pdf
