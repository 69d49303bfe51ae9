#include "idsign/pdf/document.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "idsign/error.h"
#include "idsign/pdf/filters.h"
#include "idsign/pdf/parser.h"

namespace idsign::pdf {

namespace {

constexpr int kMaxLoadDepth = 32;
constexpr int kMaxTreeDepth = 64;

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedPdf, what);
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

std::optional<std::int64_t> FindStartXref(std::string_view data) {
  const std::size_t pos = data.rfind("startxref");
  if (pos == std::string_view::npos) return std::nullopt;
  Parser p(data, pos + 9);
  return p.ReadUnsigned();
}

std::int64_t ReadField(std::string_view row, std::size_t start,
                       std::size_t width) {
  std::int64_t v = 0;
  for (std::size_t i = start; i < start + width; ++i) {
    v = (v << 8) | static_cast<unsigned char>(row[i]);
  }
  return v;
}

}  // namespace

Document Document::Open(std::string_view data) {
  Document doc(data);
  try {
    const auto start = FindStartXref(data);
    if (!start) Malformed("startxref not found");
    doc.startxref_ = *start;
    doc.LoadXrefChain(*start);
    doc.Validate();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMalformedPdf) throw;
    Document fixed(data);
    fixed.Repair();
    fixed.Validate();
    return fixed;
  }
  return doc;
}

void Document::Validate() const {
  const Object* root = trailer_.Get("Root");
  if (root == nullptr || !root->is_ref()) Malformed("trailer lacks /Root");
  const Object catalog = Resolve(*root);
  if (!catalog.is_dict()) Malformed("catalog is not a dictionary");
  if (Pages().empty()) Malformed("document has no pages");
}

void Document::LoadXrefChain(std::int64_t offset) {
  std::set<std::int64_t> seen;
  bool newest = true;
  while (offset >= 0) {
    if (!seen.insert(offset).second) break;
    if (static_cast<std::size_t>(offset) >= data_.size()) {
      Malformed("xref offset beyond end of file");
    }
    Parser p(data_, static_cast<std::size_t>(offset));
    Dict section_trailer;
    if (p.ConsumeKeyword("xref")) {
      section_trailer = LoadXrefTable(p.pos(), newest);
      if (const Object* stm = section_trailer.Get("XRefStm");
          stm != nullptr && stm->is_int()) {
        LoadXrefStream(static_cast<std::size_t>(stm->as_int()), false, nullptr);
      }
    } else {
      LoadXrefStream(static_cast<std::size_t>(offset), newest,
                     &section_trailer);
    }
    newest = false;
    const Object* prev = section_trailer.Get("Prev");
    offset = prev != nullptr && prev->is_int() ? prev->as_int() : -1;
  }
}

Dict Document::LoadXrefTable(std::size_t offset, bool newest) {
  Parser p(data_, offset);
  while (true) {
    const std::size_t before = p.pos();
    const auto start = p.ReadUnsigned();
    const auto count = p.ReadUnsigned();
    if (!start || !count) {
      p.set_pos(before);
      break;
    }
    for (std::int64_t i = 0; i < *count; ++i) {
      const auto off = p.ReadUnsigned();
      const auto gen = p.ReadUnsigned();
      p.SkipWhitespace();
      const bool in_use = p.ConsumeKeyword("n");
      if (!off || !gen || (!in_use && !p.ConsumeKeyword("f"))) {
        Malformed("bad xref entry");
      }
      XrefEntry e;
      e.kind = in_use ? XrefEntry::Kind::kInFile : XrefEntry::Kind::kFree;
      e.offset = *off;
      e.gen = static_cast<int>(*gen);
      const int num = static_cast<int>(*start + i);
      if (in_use && e.offset == 0) e.kind = XrefEntry::Kind::kFree;
      xref_.emplace(num, e);
    }
  }
  if (!p.ConsumeKeyword("trailer")) Malformed("trailer not found");
  const Object tr = p.ParseObject();
  if (!tr.is_dict()) Malformed("trailer is not a dictionary");
  if (newest) trailer_ = tr.as_dict();
  return tr.as_dict();
}

void Document::LoadXrefStream(std::size_t offset, bool newest,
                              Dict* trailer_out) {
  Parser p(data_, offset);
  const IndirectObject obj = p.ParseIndirectObject([this](Ref r) {
    auto len = Load(r);
    return len && len->object.is_int() ? std::optional(len->object.as_int())
                                       : std::nullopt;
  });
  if (!obj.stream || !obj.stream->dict.Get("Type") ||
      !obj.stream->dict.Get("Type")->IsName("XRef")) {
    Malformed("expected a cross-reference stream");
  }
  const Dict& dict = obj.stream->dict;
  const std::string data = DecodeStream(*obj.stream);

  const Object* w = dict.Get("W");
  if (w == nullptr || !w->is_array() || w->as_array().size() != 3) {
    Malformed("bad /W in xref stream");
  }
  std::array<std::size_t, 3> widths{};
  for (int i = 0; i < 3; ++i) {
    const Object& v = w->as_array()[i];
    if (!v.is_int() || v.as_int() < 0 || v.as_int() > 8) {
      Malformed("bad /W in xref stream");
    }
    widths[i] = static_cast<std::size_t>(v.as_int());
  }
  const std::size_t row = widths[0] + widths[1] + widths[2];
  if (row == 0) Malformed("empty xref stream rows");

  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  if (const Object* index = dict.Get("Index"); index && index->is_array()) {
    const Array& arr = index->as_array();
    for (std::size_t i = 0; i + 1 < arr.size(); i += 2) {
      if (!arr[i].is_int() || !arr[i + 1].is_int()) Malformed("bad /Index");
      ranges.emplace_back(arr[i].as_int(), arr[i + 1].as_int());
    }
  } else {
    const Object* size = dict.Get("Size");
    if (size == nullptr || !size->is_int()) Malformed("xref stream lacks /Size");
    ranges.emplace_back(0, size->as_int());
  }

  std::size_t pos = 0;
  for (const auto& [first, count] : ranges) {
    for (std::int64_t i = 0; i < count; ++i, pos += row) {
      if (pos + row > data.size()) Malformed("xref stream too short");
      const std::string_view r(data.data() + pos, row);
      const std::int64_t type = widths[0] ? ReadField(r, 0, widths[0]) : 1;
      const std::int64_t f2 = ReadField(r, widths[0], widths[1]);
      const std::int64_t f3 = ReadField(r, widths[0] + widths[1], widths[2]);
      XrefEntry e;
      if (type == 1) {
        e.kind = XrefEntry::Kind::kInFile;
        e.offset = f2;
        e.gen = static_cast<int>(f3);
      } else if (type == 2) {
        e.kind = XrefEntry::Kind::kCompressed;
        e.stream_num = static_cast<int>(f2);
        e.index = static_cast<int>(f3);
      }
      xref_.emplace(static_cast<int>(first + i), e);
    }
  }
  if (newest) trailer_ = dict;
  if (trailer_out != nullptr) *trailer_out = dict;
}

void Document::Repair() {
  repaired_ = true;
  xref_.clear();
  cache_.clear();
  object_streams_.clear();

  // Every "num gen obj" header; later definitions win, as in an update.
  std::size_t pos = 0;
  while ((pos = data_.find("obj", pos)) != std::string_view::npos) {
    const std::size_t kw = pos;
    pos += 3;
    if (pos < data_.size() && !IsPdfWhitespace(data_[pos]) &&
        !IsPdfDelimiter(data_[pos])) {
      continue;
    }
    std::size_t i = kw;
    auto skip_ws = [&] {
      while (i > 0 && IsPdfWhitespace(data_[i - 1])) --i;
    };
    auto skip_digits = [&] {
      const std::size_t end = i;
      while (i > 0 && IsDigit(data_[i - 1])) --i;
      return i < end;
    };
    skip_ws();
    if (i == kw || !skip_digits()) continue;
    const std::size_t gen_start = i;
    skip_ws();
    if (i == gen_start || !skip_digits()) continue;
    if (i > 0 && !IsPdfWhitespace(data_[i - 1]) &&
        !IsPdfDelimiter(data_[i - 1])) {
      continue;
    }
    Parser p(data_, i);
    const auto num = p.ReadUnsigned();
    const auto gen = p.ReadUnsigned();
    if (!num || !gen) continue;
    XrefEntry e;
    e.kind = XrefEntry::Kind::kInFile;
    e.offset = static_cast<std::int64_t>(i);
    e.gen = static_cast<int>(*gen);
    xref_[static_cast<int>(*num)] = e;
  }

  // Trailer: the last classic trailer carrying /Root, else the last
  // cross-reference stream dictionary carrying /Root.
  std::optional<Dict> trailer;
  for (std::size_t t = data_.find("trailer"); t != std::string_view::npos;
       t = data_.find("trailer", t + 7)) {
    try {
      Parser p(data_, t + 7);
      const Object obj = p.ParseObject();
      if (obj.is_dict() && obj.as_dict().Contains("Root")) {
        trailer = obj.as_dict();
      }
    } catch (const Error&) {
    }
  }

  std::optional<Ref> catalog;
  std::vector<int> object_streams;
  const auto entries = xref_;
  for (const auto& [num, entry] : entries) {
    std::optional<IndirectObject> obj;
    try {
      obj = Load(Ref{num, entry.gen});
    } catch (const Error&) {
      continue;
    }
    if (!obj || !obj->object.is_dict()) continue;
    const Dict& d = obj->object.as_dict();
    const Object* type = d.Get("Type");
    if (type == nullptr) continue;
    if (type->IsName("XRef") && !trailer && d.Contains("Root")) {
      trailer = d;
    } else if (type->IsName("Catalog")) {
      catalog = obj->ref;
    } else if (type->IsName("ObjStm")) {
      object_streams.push_back(num);
    }
  }
  for (int stm : object_streams) {
    try {
      const auto obj = Load(Ref{stm, 0});
      if (!obj || !obj->stream) continue;
      const std::string decoded = DecodeStream(*obj->stream);
      const Object* n = obj->stream->dict.Get("N");
      if (n == nullptr || !n->is_int()) continue;
      Parser p(decoded);
      for (std::int64_t k = 0; k < n->as_int(); ++k) {
        const auto num = p.ReadUnsigned();
        const auto off = p.ReadUnsigned();
        if (!num || !off) break;
        XrefEntry e;
        e.kind = XrefEntry::Kind::kCompressed;
        e.stream_num = stm;
        e.index = static_cast<int>(k);
        xref_.emplace(static_cast<int>(*num), e);
      }
    } catch (const Error&) {
    }
  }

  if (trailer) {
    trailer_ = *trailer;
  } else if (catalog) {
    trailer_.Set("Root", *catalog);
  } else {
    Malformed("no document catalog found");
  }
  trailer_.Erase("Prev");
  trailer_.Erase("XRefStm");
  cache_.clear();
}

int Document::next_object_number() const {
  int n = 1;
  if (const Object* size = trailer_.Get("Size"); size && size->is_int()) {
    n = static_cast<int>(size->as_int());
  }
  if (!xref_.empty()) n = std::max(n, xref_.rbegin()->first + 1);
  return n;
}

std::optional<IndirectObject> Document::Load(Ref ref) const {
  if (const auto it = cache_.find(ref); it != cache_.end()) return *it->second;
  const auto entry = xref_.find(ref.num);
  if (entry == xref_.end()) return std::nullopt;
  if (load_depth_ > kMaxLoadDepth) Malformed("reference chain too deep");
  ++load_depth_;
  struct DepthGuard {
    int& d;
    ~DepthGuard() { --d; }
  } guard{load_depth_};

  std::optional<IndirectObject> out;
  switch (entry->second.kind) {
    case XrefEntry::Kind::kFree:
      return std::nullopt;
    case XrefEntry::Kind::kCompressed:
      out = LoadCompressed(ref, entry->second);
      break;
    case XrefEntry::Kind::kInFile: {
      const auto offset = static_cast<std::size_t>(entry->second.offset);
      if (offset >= data_.size()) Malformed("object offset beyond end of file");
      Parser p(data_, offset);
      out = p.ParseIndirectObject([this](Ref r) {
        auto len = Load(r);
        return len && len->object.is_int()
                   ? std::optional(len->object.as_int())
                   : std::nullopt;
      });
      if (out->ref.num != ref.num) {
        Malformed("xref points at object " + std::to_string(out->ref.num) +
                  " instead of " + std::to_string(ref.num));
      }
      break;
    }
  }
  if (out) cache_[ref] = std::make_shared<const IndirectObject>(*out);
  return out;
}

std::optional<IndirectObject> Document::LoadCompressed(
    Ref ref, const XrefEntry& entry) const {
  auto it = object_streams_.find(entry.stream_num);
  if (it == object_streams_.end()) {
    const auto container = Load(Ref{entry.stream_num, 0});
    if (!container || !container->stream) {
      Malformed("object stream " + std::to_string(entry.stream_num) +
                " missing");
    }
    const Dict& d = container->stream->dict;
    const Object* n = d.Get("N");
    const Object* first = d.Get("First");
    if (n == nullptr || !n->is_int() || first == nullptr || !first->is_int()) {
      Malformed("object stream lacks /N or /First");
    }
    const std::string decoded = DecodeStream(*container->stream);
    Parser header(decoded);
    std::vector<std::pair<std::int64_t, std::int64_t>> index;
    for (std::int64_t k = 0; k < n->as_int(); ++k) {
      const auto num = header.ReadUnsigned();
      const auto off = header.ReadUnsigned();
      if (!num || !off) Malformed("bad object stream header");
      index.emplace_back(*num, *off);
    }
    auto objects = std::make_shared<std::vector<IndirectObject>>();
    for (const auto& [num, off] : index) {
      const auto at = static_cast<std::size_t>(first->as_int() + off);
      if (at >= decoded.size()) Malformed("object stream offset out of range");
      Parser p(decoded, at);
      objects->push_back({Ref{static_cast<int>(num), 0}, p.ParseObject(), {}});
    }
    it = object_streams_.emplace(entry.stream_num, std::move(objects)).first;
  }
  const auto& objects = *it->second;
  if (entry.index < 0 || static_cast<std::size_t>(entry.index) >= objects.size() ||
      objects[entry.index].ref.num != ref.num) {
    // Index mismatch: fall back to a search by number.
    for (const auto& o : objects) {
      if (o.ref.num == ref.num) return o;
    }
    return std::nullopt;
  }
  return objects[entry.index];
}

Object Document::Resolve(const Object& obj) const {
  Object current = obj;
  for (int hops = 0; current.is_ref(); ++hops) {
    if (hops > kMaxLoadDepth) return Null{};
    const auto loaded = Load(current.as_ref());
    if (!loaded) return Null{};
    current = loaded->object;
  }
  return current;
}

std::vector<Page> Document::Pages() const {
  const Object catalog = Resolve(*trailer_.Get("Root"));
  if (!catalog.is_dict()) Malformed("catalog is not a dictionary");
  const Object* root_pages = catalog.as_dict().Get("Pages");
  if (root_pages == nullptr) Malformed("catalog lacks /Pages");

  struct Inherited {
    std::optional<Object> resources, media_box, crop_box, rotate;
  };
  std::vector<Page> pages;
  std::set<Ref> visited;

  auto to_box = [this](const Object& box) -> std::optional<std::array<double, 4>> {
    const Object resolved = Resolve(box);
    if (!resolved.is_array() || resolved.as_array().size() != 4) {
      return std::nullopt;
    }
    std::array<double, 4> v{};
    for (int i = 0; i < 4; ++i) {
      const Object n = Resolve(resolved.as_array()[i]);
      if (!n.is_number()) return std::nullopt;
      v[i] = n.as_number();
    }
    return std::array<double, 4>{std::min(v[0], v[2]), std::min(v[1], v[3]),
                                 std::max(v[0], v[2]), std::max(v[1], v[3])};
  };

  std::function<void(const Object&, Inherited, int)> walk =
      [&](const Object& node, Inherited inh, int depth) {
        if (depth > kMaxTreeDepth) Malformed("page tree too deep");
        if (!node.is_ref()) {
          throw Error(ErrorCode::kUnsupportedPdf, "page tree node is not indirect");
        }
        const Ref ref = node.as_ref();
        if (!visited.insert(ref).second) Malformed("cycle in page tree");
        const Object resolved = Resolve(node);
        if (!resolved.is_dict()) Malformed("page tree node is not a dictionary");
        const Dict& d = resolved.as_dict();
        if (const Object* v = d.Get("Resources")) inh.resources = *v;
        if (const Object* v = d.Get("MediaBox")) inh.media_box = *v;
        if (const Object* v = d.Get("CropBox")) inh.crop_box = *v;
        if (const Object* v = d.Get("Rotate")) inh.rotate = *v;

        const Object* type = d.Get("Type");
        const Object* kids = d.Get("Kids");
        const bool is_tree = (type != nullptr && type->IsName("Pages")) ||
                             (kids != nullptr && !(type && type->IsName("Page")));
        if (is_tree) {
          const Object kid_list = kids ? Resolve(*kids) : Object(Array{});
          if (!kid_list.is_array()) Malformed("/Kids is not an array");
          for (const Object& kid : kid_list.as_array()) walk(kid, inh, depth + 1);
          return;
        }

        Page page;
        page.ref = ref;
        page.dict = d;
        if (inh.resources) {
          const Object res = Resolve(*inh.resources);
          if (res.is_dict()) page.resources = res.as_dict();
        }
        std::optional<std::array<double, 4>> box;
        if (inh.crop_box) box = to_box(*inh.crop_box);
        if (!box && inh.media_box) box = to_box(*inh.media_box);
        page.box = box.value_or(std::array<double, 4>{0, 0, 612, 792});
        if (inh.rotate) {
          const Object r = Resolve(*inh.rotate);
          if (r.is_number()) {
            const long deg = std::lround(r.as_number() / 90.0) * 90;
            page.rotate = static_cast<int>(((deg % 360) + 360) % 360);
          }
        }
        pages.push_back(std::move(page));
      };
  walk(*root_pages, Inherited{}, 0);
  return pages;
}

}  // namespace idsign::pdf
