#ifndef IDSIGN_PDF_DOCUMENT_H_
#define IDSIGN_PDF_DOCUMENT_H_

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "idsign/pdf/object.h"

namespace idsign::pdf {

struct XrefEntry {
  enum class Kind { kFree, kInFile, kCompressed };
  Kind kind = Kind::kFree;
  std::int64_t offset = 0;  // kInFile
  int gen = 0;
  int stream_num = 0;       // kCompressed
  int index = 0;            // kCompressed
};

struct Page {
  Ref ref;
  Dict dict;
  Dict resources;                 // effective: inherited and resolved
  std::array<double, 4> box{};    // CropBox, else MediaBox; llx lly urx ury
  int rotate = 0;                 // 0, 90, 180 or 270
};

// Read-only view of a PDF file: merged cross-reference data (classic tables,
// cross-reference streams, hybrid files, /Prev chains) with a full-scan
// fallback for damaged files. |data| must outlive the document.
class Document {
 public:
  // Throws Error(kMalformedPdf) when no usable structure can be found.
  static Document Open(std::string_view data);

  const Dict& trailer() const { return trailer_; }
  bool repaired() const { return repaired_; }
  // Offset of the newest cross-reference section; meaningful only when not
  // repaired.
  std::int64_t startxref() const { return startxref_; }
  bool encrypted() const { return trailer_.Contains("Encrypt"); }
  // Smallest object number not in use (the /Size an update must exceed).
  int next_object_number() const;
  const std::map<int, XrefEntry>& xref() const { return xref_; }

  std::optional<IndirectObject> Load(Ref ref) const;
  // Follows references; dangling references resolve to null.
  Object Resolve(const Object& obj) const;

  // Pages in document order. Throws Error(kMalformedPdf) for broken trees.
  std::vector<Page> Pages() const;

 private:
  explicit Document(std::string_view data) : data_(data) {}

  void LoadXrefChain(std::int64_t offset);
  Dict LoadXrefTable(std::size_t offset, bool newest);
  void LoadXrefStream(std::size_t offset, bool newest, Dict* trailer_out);
  void Repair();
  void Validate() const;
  std::optional<IndirectObject> LoadCompressed(Ref ref,
                                               const XrefEntry& entry) const;

  std::string_view data_;
  std::map<int, XrefEntry> xref_;
  Dict trailer_;
  std::int64_t startxref_ = -1;
  bool repaired_ = false;

  mutable std::map<Ref, std::shared_ptr<const IndirectObject>> cache_;
  mutable std::map<int, std::shared_ptr<const std::vector<IndirectObject>>>
      object_streams_;
  mutable int load_depth_ = 0;
};

}  // namespace idsign::pdf

#endif  // IDSIGN_PDF_DOCUMENT_H_
