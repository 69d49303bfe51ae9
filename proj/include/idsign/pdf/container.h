#ifndef IDSIGN_PDF_CONTAINER_H_
#define IDSIGN_PDF_CONTAINER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "idsign/signature/engine.h"
#include "idsign/timestamp.h"

// Signed file layout:
//
//   original bytes [0, original_length)      covered by doc_hash
//   banner incremental update (overlay)      unsigned, regenerable
//   "\n%%IDSIGN-BEGIN-v1\n"
//   "%" base64url(payload) "\n"              76 chars per line
//   "%%IDSIGN-END\n"                         final bytes of the file
namespace idsign::pdf {

inline constexpr std::string_view kBlockBegin = "\n%%IDSIGN-BEGIN-v1\n";
inline constexpr std::string_view kBlockEnd = "%%IDSIGN-END\n";
inline constexpr std::size_t kBlockLineWidth = 76;

struct BannerSpec {
  std::vector<std::string> lines;
  double font_size = 9.0;

  // "Digitally signed with IdentitySign", "<name>: <value>" per attribute,
  // "Signed at <timestamp>", verify_hint.
  static BannerSpec ForPayload(const sig::SignaturePayload& payload);
  bool operator==(const BannerSpec&) const = default;
};

// Throws Error(kNotAPdf) unless |bytes| starts with "%PDF-" and contains
// "%%EOF".
void DetectPdf(std::string_view bytes);
bool IsPdf(std::string_view bytes);

// original ++ banner update ++ block. Throws kNotAPdf, kAlreadySigned,
// kHashMismatch, kInvalidBanner, kUnsupportedPdf.
std::string Embed(std::string_view original,
                  const sig::SignaturePayload& payload,
                  const BannerSpec& banner);
std::string Embed(std::string_view original,
                  const sig::SignaturePayload& payload);

// The marker block for |payload|.
std::string RenderBlock(const sig::SignaturePayload& payload);

struct AppendedRegion {
  std::size_t overlay_offset = 0;
  std::size_t overlay_length = 0;
  std::size_t block_offset = 0;
  std::size_t block_length = 0;
};

struct Extracted {
  std::uint64_t original_length = 0;
  sig::SignaturePayload payload;
  AppendedRegion region;
};

// Throws kNoSignature when no marker is present, kCorruptBlock when one is
// but the block does not decode to a payload or is not the end of file.
Extracted Extract(std::string_view signed_bytes);

// Bytes [0, original_length). Throws kNoSignature, kCorruptBlock.
std::string ExtractOriginal(std::string_view signed_bytes);

// Never throws. A banner update that differs from the one regenerated from
// the original and the payload makes the report invalid.
sig::VerificationReport VerifyFile(std::string_view signed_bytes,
                                   const sig::TrustRoots& trust_roots,
                                   Timestamp now);

// Checks that the file up to the block parses through its newest
// cross-reference section without repair and that every listed object
// loads. Throws Error(kMalformedPdf).
void CheckStructure(std::string_view signed_bytes);

}  // namespace idsign::pdf

#endif  // IDSIGN_PDF_CONTAINER_H_
