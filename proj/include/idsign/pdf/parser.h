#ifndef IDSIGN_PDF_PARSER_H_
#define IDSIGN_PDF_PARSER_H_

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "idsign/pdf/object.h"

namespace idsign::pdf {

bool IsPdfWhitespace(char c);
bool IsPdfDelimiter(char c);

// Recursive-descent reader for PDF object syntax over an in-memory file.
// All failures throw Error(kMalformedPdf).
class Parser {
 public:
  // Resolves an indirect /Length. Returns nullopt when unknown.
  using LengthResolver = std::function<std::optional<std::int64_t>(Ref)>;

  explicit Parser(std::string_view data, std::size_t pos = 0)
      : data_(data), pos_(pos) {}

  Object ParseObject();

  // Parses "num gen obj ... endobj" starting at the current position,
  // including stream data when present.
  IndirectObject ParseIndirectObject(const LengthResolver& resolve_length);

  // Skips whitespace and comments.
  void SkipWhitespace();
  // Consumes |keyword| if it is the next token.
  bool ConsumeKeyword(std::string_view keyword);
  // Reads an unsigned integer token if one is next.
  std::optional<std::int64_t> ReadUnsigned();

  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t pos) { pos_ = pos; }
  bool AtEnd() const { return pos_ >= data_.size(); }

 private:
  Object ParseValue(int depth);
  Object ParseNumberOrRef();
  String ParseLiteralString();
  String ParseHexString();
  Name ParseName();
  std::string_view ReadKeyword();
  [[noreturn]] void Fail(const std::string& what) const;

  std::string_view data_;
  std::size_t pos_;
};

}  // namespace idsign::pdf

#endif  // IDSIGN_PDF_PARSER_H_
