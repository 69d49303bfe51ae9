#include "idsign/canonical.h"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "idsign/error.h"

namespace idsign {

namespace {

// Strict UTF-8 validation: no overlongs, no surrogates, max U+10FFFF.
bool IsValidUtf8(std::string_view s) {
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  const auto* end = p + s.size();
  while (p < end) {
    const unsigned char c = *p;
    if (c < 0x80) {
      ++p;
      continue;
    }
    int len;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (end - p < len) return false;
    for (int i = 1; i < len; ++i) {
      if ((p[i] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (p[i] & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    p += len;
  }
  return true;
}

nlohmann::json Normalize(const nlohmann::json& value) {
  using Type = nlohmann::json::value_t;
  switch (value.type()) {
    case Type::string:
      return NormalizeNfc(value.get_ref<const std::string&>());
    case Type::number_integer:
    case Type::number_unsigned:
      return value;
    case Type::array: {
      nlohmann::json out = nlohmann::json::array();
      for (const auto& item : value) out.push_back(Normalize(item));
      return out;
    }
    case Type::object: {
      nlohmann::json out = nlohmann::json::object();
      for (const auto& [key, item] : value.items()) {
        std::string nkey = NormalizeNfc(key);
        if (out.contains(nkey)) {
          throw Error(ErrorCode::kNonCanonicalizable,
                      "keys collide after normalization: " + nkey);
        }
        out[std::move(nkey)] = Normalize(item);
      }
      return out;
    }
    case Type::number_float:
      throw Error(ErrorCode::kNonCanonicalizable, "floating-point value");
    default:
      throw Error(ErrorCode::kNonCanonicalizable,
                  std::string("unsupported type ") + value.type_name());
  }
}

}  // namespace

std::string NormalizeNfc(std::string_view utf8) {
  if (!IsValidUtf8(utf8)) {
    throw Error(ErrorCode::kBadEncoding, "invalid UTF-8");
  }
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kBadEncoding, "NFC normalizer unavailable");
  }
  const auto text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  if (nfc->isNormalized(text, status) && U_SUCCESS(status)) {
    return std::string(utf8);
  }
  status = U_ZERO_ERROR;
  const icu::UnicodeString normalized = nfc->normalize(text, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kBadEncoding, "normalization failed");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::size_t CodePointCount(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

CanonicalBytes CanonicalEncode(const nlohmann::json& value) {
  // nlohmann's default object type is a std::map, so keys come out in
  // byte order, which for UTF-8 is code point order.
  return CanonicalBytes(Normalize(value).dump(
      -1, ' ', false, nlohmann::json::error_handler_t::strict));
}

nlohmann::json ParseCanonical(std::string_view bytes) {
  nlohmann::json parsed =
      nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::kNonCanonicalizable, "not JSON");
  }
  if (CanonicalEncode(parsed).view() != bytes) {
    throw Error(ErrorCode::kNonCanonicalizable, "not in canonical form");
  }
  return parsed;
}

}  // namespace idsign
