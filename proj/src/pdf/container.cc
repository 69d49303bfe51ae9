#include "idsign/pdf/container.h"

#include "idsign/crypto.h"
#include "idsign/error.h"
#include "idsign/pdf/banner.h"
#include "idsign/pdf/document.h"

namespace idsign::pdf {

namespace {

constexpr std::string_view kAnyMarker = "%%IDSIGN-";

bool HasMarker(std::string_view bytes) {
  return bytes.find(kAnyMarker) != std::string_view::npos;
}

bool IsBase64UrlChar(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '-' || c == '_';
}

[[noreturn]] void Corrupt(const std::string& detail) {
  throw Error(ErrorCode::kCorruptBlock, detail);
}

std::string LastSegment(const AttributeId& id) {
  const std::string rendered = id.Render();
  return rendered.substr(rendered.rfind('.') + 1);
}

}  // namespace

BannerSpec BannerSpec::ForPayload(const sig::SignaturePayload& payload) {
  BannerSpec spec;
  spec.lines.push_back("Digitally signed with IdentitySign");
  for (const auto& a : payload.attributes) {
    spec.lines.push_back(LastSegment(a.id()) + ": " + a.value());
  }
  spec.lines.push_back("Signed at " + payload.signed_at.ToString());
  if (!payload.verify_hint.empty()) spec.lines.push_back(payload.verify_hint);
  return spec;
}

bool IsPdf(std::string_view bytes) {
  return bytes.starts_with("%PDF-") &&
         bytes.find("%%EOF") != std::string_view::npos;
}

void DetectPdf(std::string_view bytes) {
  if (!IsPdf(bytes)) throw Error(ErrorCode::kNotAPdf, "not a PDF file");
}

std::string RenderBlock(const sig::SignaturePayload& payload) {
  const std::string encoded = Base64UrlEncode(AsBytes(payload.Serialize()));
  std::string out(kBlockBegin);
  for (std::size_t i = 0; i < encoded.size(); i += kBlockLineWidth) {
    out += '%';
    out.append(encoded, i, kBlockLineWidth);
    out += '\n';
  }
  out += kBlockEnd;
  return out;
}

std::string Embed(std::string_view original,
                  const sig::SignaturePayload& payload,
                  const BannerSpec& banner) {
  DetectPdf(original);
  if (HasMarker(original)) {
    throw Error(ErrorCode::kAlreadySigned, "file already carries a signature");
  }
  if (payload.original_length != original.size()) {
    throw Error(ErrorCode::kHashMismatch, "original_length does not match");
  }
  if (payload.doc_hash != Digest(original)) {
    throw Error(ErrorCode::kHashMismatch, "doc_hash does not match");
  }
  if (banner.lines.empty() ||
      banner.lines != BannerSpec::ForPayload(payload).lines ||
      banner.font_size != kBannerFontSize) {
    throw Error(ErrorCode::kInvalidBanner,
                "banner does not match the signature payload");
  }
  std::string out(original);
  out += BuildBannerUpdate(original, banner.lines);
  out += RenderBlock(payload);
  return out;
}

std::string Embed(std::string_view original,
                  const sig::SignaturePayload& payload) {
  return Embed(original, payload, BannerSpec::ForPayload(payload));
}

Extracted Extract(std::string_view bytes) {
  if (!HasMarker(bytes)) {
    throw Error(ErrorCode::kNoSignature, "no signature present");
  }
  const std::size_t begin = bytes.rfind(kBlockBegin);
  if (begin == std::string_view::npos) Corrupt("missing begin marker");
  if (!bytes.ends_with(kBlockEnd)) Corrupt("block is not at end of file");
  const std::size_t end = bytes.size() - kBlockEnd.size();
  std::size_t pos = begin + kBlockBegin.size();
  if (pos >= end) Corrupt("empty block");

  std::string encoded;
  while (pos < end) {
    if (bytes[pos] != '%') Corrupt("block line without comment prefix");
    ++pos;
    std::size_t len = 0;
    while (pos + len < end && IsBase64UrlChar(bytes[pos + len])) ++len;
    if (len == 0 || len > kBlockLineWidth) Corrupt("bad block line length");
    if (pos + len >= end || bytes[pos + len] != '\n') {
      Corrupt("bad character in block");
    }
    encoded.append(bytes.substr(pos, len));
    pos += len + 1;
  }

  Extracted ex;
  try {
    ex.payload = sig::SignaturePayload::Parse(
        Base64UrlDecodeToString(encoded));
  } catch (const Error& e) {
    Corrupt(std::string("payload does not decode: ") + e.what());
  }
  const std::string_view block = bytes.substr(begin);
  if (RenderBlock(ex.payload) != block) Corrupt("block is not canonical");
  if (ex.payload.original_length > begin) {
    Corrupt("original_length exceeds file");
  }
  ex.original_length = ex.payload.original_length;
  ex.region.overlay_offset = static_cast<std::size_t>(ex.original_length);
  ex.region.overlay_length = begin - ex.region.overlay_offset;
  ex.region.block_offset = begin;
  ex.region.block_length = block.size();
  return ex;
}

std::string ExtractOriginal(std::string_view signed_bytes) {
  const Extracted ex = Extract(signed_bytes);
  return std::string(signed_bytes.substr(0, ex.original_length));
}

sig::VerificationReport VerifyFile(std::string_view bytes,
                                   const sig::TrustRoots& trust_roots,
                                   Timestamp now) {
  Extracted ex;
  try {
    ex = Extract(bytes);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoSignature) {
      return sig::VerificationReport::NoSignature();
    }
    return sig::VerificationReport::Invalid("corrupt signature block");
  }
  const std::string_view original = bytes.substr(0, ex.original_length);
  sig::VerifyPolicy policy;
  policy.now = now;
  sig::VerificationReport report = sig::VerifyPayload(
      ex.payload, trust_roots, Digest(original), policy);
  if (ex.region.overlay_length == 0) return report;

  report.AddWarning(sig::warning::kUnsignedOverlayPresent);
  if (!report.intact()) return report;
  const std::string_view overlay =
      bytes.substr(ex.region.overlay_offset, ex.region.overlay_length);
  std::string expected;
  try {
    expected = BuildBannerUpdate(
        original, BannerSpec::ForPayload(ex.payload).lines);
  } catch (const Error&) {
  }
  if (overlay != expected) {
    sig::VerificationReport invalid =
        sig::VerificationReport::Invalid("banner overlay altered");
    invalid.AddWarning(sig::warning::kUnsignedOverlayPresent);
    return invalid;
  }
  return report;
}

void CheckStructure(std::string_view signed_bytes) {
  std::string_view body = signed_bytes;
  if (HasMarker(signed_bytes)) {
    try {
      body = signed_bytes.substr(0, Extract(signed_bytes).region.block_offset);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedPdf, e.what());
    }
  }
  const Document doc = Document::Open(body);
  if (doc.repaired()) {
    throw Error(ErrorCode::kMalformedPdf,
                "cross-reference data does not resolve");
  }
  for (const auto& [num, entry] : doc.xref()) {
    if (entry.kind == XrefEntry::Kind::kFree) continue;
    if (!doc.Load(Ref{num, entry.gen})) {
      throw Error(ErrorCode::kMalformedPdf,
                  "object " + std::to_string(num) + " does not load");
    }
  }
  doc.Pages();
}

}  // namespace idsign::pdf
