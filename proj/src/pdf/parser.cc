#include "idsign/pdf/parser.h"

#include <charconv>

#include "idsign/error.h"

namespace idsign::pdf {

namespace {

constexpr int kMaxDepth = 256;

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

bool IsPdfWhitespace(char c) {
  return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' ||
         c == '\0';
}

bool IsPdfDelimiter(char c) {
  switch (c) {
    case '(': case ')': case '<': case '>': case '[': case ']':
    case '{': case '}': case '/': case '%':
      return true;
    default:
      return false;
  }
}

void Parser::Fail(const std::string& what) const {
  throw Error(ErrorCode::kMalformedPdf,
              what + " at offset " + std::to_string(pos_));
}

void Parser::SkipWhitespace() {
  while (pos_ < data_.size()) {
    const char c = data_[pos_];
    if (IsPdfWhitespace(c)) {
      ++pos_;
    } else if (c == '%') {
      while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r')
        ++pos_;
    } else {
      break;
    }
  }
}

std::string_view Parser::ReadKeyword() {
  const std::size_t start = pos_;
  while (pos_ < data_.size() && !IsPdfWhitespace(data_[pos_]) &&
         !IsPdfDelimiter(data_[pos_])) {
    ++pos_;
  }
  return data_.substr(start, pos_ - start);
}

bool Parser::ConsumeKeyword(std::string_view keyword) {
  SkipWhitespace();
  const std::size_t saved = pos_;
  if (ReadKeyword() == keyword) return true;
  pos_ = saved;
  return false;
}

std::optional<std::int64_t> Parser::ReadUnsigned() {
  SkipWhitespace();
  const std::size_t start = pos_;
  while (pos_ < data_.size() && IsDigit(data_[pos_])) ++pos_;
  if (pos_ == start || pos_ - start > 18 ||
      (pos_ < data_.size() && !IsPdfWhitespace(data_[pos_]) &&
       !IsPdfDelimiter(data_[pos_]))) {
    pos_ = start;
    return std::nullopt;
  }
  std::int64_t v = 0;
  std::from_chars(data_.data() + start, data_.data() + pos_, v);
  return v;
}

Object Parser::ParseObject() { return ParseValue(0); }

Object Parser::ParseValue(int depth) {
  if (depth > kMaxDepth) Fail("nesting too deep");
  SkipWhitespace();
  if (AtEnd()) Fail("unexpected end of data");
  const char c = data_[pos_];
  if (c == '/') return ParseName();
  if (c == '(') return ParseLiteralString();
  if (c == '[') {
    ++pos_;
    Array arr;
    while (true) {
      SkipWhitespace();
      if (AtEnd()) Fail("unterminated array");
      if (data_[pos_] == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(ParseValue(depth + 1));
    }
  }
  if (c == '<') {
    if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '<') {
      pos_ += 2;
      Dict dict;
      while (true) {
        SkipWhitespace();
        if (AtEnd()) Fail("unterminated dictionary");
        if (data_[pos_] == '>') {
          if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') {
            pos_ += 2;
            return dict;
          }
          Fail("stray '>'");
        }
        if (data_[pos_] != '/') Fail("dictionary key is not a name");
        Name key = ParseName();
        SkipWhitespace();
        // Tolerate a missing value right before the closing delimiter.
        if (pos_ + 1 < data_.size() && data_[pos_] == '>' &&
            data_[pos_ + 1] == '>') {
          dict.Set(std::move(key.value), Null{});
          continue;
        }
        dict.Set(std::move(key.value), ParseValue(depth + 1));
      }
    }
    return ParseHexString();
  }
  if (IsDigit(c) || c == '+' || c == '-' || c == '.') return ParseNumberOrRef();

  const std::string_view kw = ReadKeyword();
  if (kw == "true") return true;
  if (kw == "false") return false;
  if (kw == "null") return Null{};
  Fail("unexpected token '" + std::string(kw.substr(0, 16)) + "'");
}

Object Parser::ParseNumberOrRef() {
  const std::size_t start = pos_;
  if (data_[pos_] == '+' || data_[pos_] == '-') ++pos_;
  bool seen_dot = false;
  bool seen_digit = false;
  while (pos_ < data_.size()) {
    const char c = data_[pos_];
    if (IsDigit(c)) {
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
    ++pos_;
  }
  if (!seen_digit) Fail("malformed number");
  const std::string_view text = data_.substr(start, pos_ - start);
  if (seen_dot) return Real{std::string(text)};

  std::int64_t value = 0;
  const char* first = text.data() + (text[0] == '+' ? 1 : 0);
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
  if (ec != std::errc()) return Real{std::string(text)};

  // "num gen R"
  if (value >= 0 && text[0] != '+' && text[0] != '-') {
    const std::size_t after_num = pos_;
    if (auto gen = ReadUnsigned()) {
      SkipWhitespace();
      if (pos_ < data_.size() && data_[pos_] == 'R' &&
          (pos_ + 1 >= data_.size() || IsPdfWhitespace(data_[pos_ + 1]) ||
           IsPdfDelimiter(data_[pos_ + 1]))) {
        ++pos_;
        return Ref{static_cast<int>(value), static_cast<int>(*gen)};
      }
    }
    pos_ = after_num;
  }
  return value;
}

String Parser::ParseLiteralString() {
  ++pos_;  // (
  String s;
  int nesting = 1;
  while (true) {
    if (AtEnd()) Fail("unterminated string");
    const char c = data_[pos_++];
    if (c == '(') {
      ++nesting;
      s.bytes += c;
    } else if (c == ')') {
      if (--nesting == 0) return s;
      s.bytes += c;
    } else if (c == '\\') {
      if (AtEnd()) Fail("unterminated escape");
      const char e = data_[pos_++];
      switch (e) {
        case 'n': s.bytes += '\n'; break;
        case 'r': s.bytes += '\r'; break;
        case 't': s.bytes += '\t'; break;
        case 'b': s.bytes += '\b'; break;
        case 'f': s.bytes += '\f'; break;
        case '\r':
          if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
          break;
        case '\n':
          break;
        default:
          if (e >= '0' && e <= '7') {
            int v = e - '0';
            for (int i = 0; i < 2 && pos_ < data_.size() &&
                            data_[pos_] >= '0' && data_[pos_] <= '7';
                 ++i) {
              v = v * 8 + (data_[pos_++] - '0');
            }
            s.bytes += static_cast<char>(v & 0xFF);
          } else {
            s.bytes += e;
          }
      }
    } else {
      s.bytes += c;
    }
  }
}

String Parser::ParseHexString() {
  ++pos_;  // <
  String s;
  s.hex = true;
  int pending = -1;
  while (true) {
    if (AtEnd()) Fail("unterminated hex string");
    const char c = data_[pos_++];
    if (c == '>') break;
    if (IsPdfWhitespace(c)) continue;
    const int v = HexValue(c);
    if (v < 0) Fail("bad hex digit");
    if (pending < 0) {
      pending = v;
    } else {
      s.bytes += static_cast<char>(pending * 16 + v);
      pending = -1;
    }
  }
  if (pending >= 0) s.bytes += static_cast<char>(pending * 16);
  return s;
}

Name Parser::ParseName() {
  ++pos_;  // /
  Name n;
  while (pos_ < data_.size() && !IsPdfWhitespace(data_[pos_]) &&
         !IsPdfDelimiter(data_[pos_])) {
    const char c = data_[pos_++];
    if (c == '#' && pos_ + 1 < data_.size() && HexValue(data_[pos_]) >= 0 &&
        HexValue(data_[pos_ + 1]) >= 0) {
      n.value +=
          static_cast<char>(HexValue(data_[pos_]) * 16 + HexValue(data_[pos_ + 1]));
      pos_ += 2;
    } else {
      n.value += c;
    }
  }
  return n;
}

IndirectObject Parser::ParseIndirectObject(const LengthResolver& resolve_length) {
  IndirectObject out;
  const auto num = ReadUnsigned();
  const auto gen = ReadUnsigned();
  if (!num || !gen || !ConsumeKeyword("obj")) Fail("expected 'N G obj'");
  out.ref = Ref{static_cast<int>(*num), static_cast<int>(*gen)};
  out.object = ParseObject();

  SkipWhitespace();
  const std::size_t saved = pos_;
  if (out.object.is_dict() && ReadKeyword() == "stream") {
    // Data starts after CRLF or LF.
    if (pos_ < data_.size() && data_[pos_] == '\r') ++pos_;
    if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
    const std::size_t data_start = pos_;

    std::optional<std::int64_t> length;
    if (const Object* len = out.object.as_dict().Get("Length")) {
      if (len->is_int()) {
        length = len->as_int();
      } else if (len->is_ref() && resolve_length) {
        length = resolve_length(len->as_ref());
      }
    }
    bool length_ok = false;
    if (length && *length >= 0 &&
        data_start + static_cast<std::size_t>(*length) <= data_.size()) {
      pos_ = data_start + static_cast<std::size_t>(*length);
      length_ok = ConsumeKeyword("endstream");
    }
    std::size_t data_end;
    if (length_ok) {
      data_end = data_start + static_cast<std::size_t>(*length);
    } else {
      const std::size_t found = data_.find("endstream", data_start);
      if (found == std::string_view::npos) Fail("missing endstream");
      data_end = found;
      if (data_end > data_start && data_[data_end - 1] == '\n') --data_end;
      if (data_end > data_start && data_[data_end - 1] == '\r') --data_end;
      pos_ = found + 9;
    }
    out.stream = Stream{out.object.as_dict(),
                        std::string(data_.substr(data_start, data_end - data_start))};
  } else {
    pos_ = saved;
  }
  // Tolerate a missing endobj; many damaged files omit it.
  ConsumeKeyword("endobj");
  return out;
}

}  // namespace idsign::pdf
