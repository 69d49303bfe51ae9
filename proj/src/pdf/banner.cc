#include "idsign/pdf/banner.h"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <map>

#include "idsign/error.h"
#include "idsign/pdf/document.h"
#include "idsign/pdf/object.h"

namespace idsign::pdf {

namespace {

constexpr double kLeading = 11.0;
constexpr double kPadding = 4.0;
constexpr double kMaxTextWidth = 520.0;  // points at kBannerFontSize
constexpr double kMaxMargin = 18.0;
constexpr double kAscent = 0.718;

// Helvetica advance widths for 0x20..0x7E.
constexpr int kAsciiWidths[95] = {
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333,
    278, 278, 556, 556, 556, 556, 556, 556, 556, 556, 556, 556, 278, 278,
    584, 584, 584, 556, 1015, 667, 667, 722, 722, 667, 611, 778, 722, 278,
    500, 667, 556, 833, 722, 778, 667, 778, 722, 667, 611, 722, 667, 944,
    667, 667, 611, 278, 278, 278, 469, 556, 333, 556, 556, 500, 556, 556,
    278, 556, 556, 222, 222, 500, 222, 833, 556, 556, 556, 556, 333, 500,
    278, 556, 500, 722, 500, 500, 500, 334, 260, 334, 584};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0" || s.empty()) s = "0";
  return s;
}

std::string LiteralString(std::string_view winansi) {
  std::string out = "(";
  for (unsigned char c : winansi) {
    if (c == '(' || c == ')' || c == '\\') {
      out += '\\';
      out += static_cast<char>(c);
    } else if (c < 0x20 || c > 0x7E) {
      char buf[5];
      std::snprintf(buf, sizeof buf, "\\%03o", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out + ")";
}

std::string Truncate(std::string text) {
  const double limit = kMaxTextWidth * 1000.0 / kBannerFontSize;
  if (HelveticaWidth(text) <= limit) return text;
  const double ellipsis = HelveticaWidth("...");
  while (!text.empty() && HelveticaWidth(text) + ellipsis > limit) {
    text.pop_back();
  }
  return text + "...";
}

// Visual page space (origin at the visual bottom-left) to user space.
std::string RotationMatrix(const std::array<double, 4>& box, int rotate) {
  const double llx = box[0], lly = box[1], urx = box[2], ury = box[3];
  switch (rotate) {
    case 90:
      return "0 1 -1 0 " + Fmt(urx) + " " + Fmt(lly) + " cm\n";
    case 180:
      return "-1 0 0 -1 " + Fmt(urx) + " " + Fmt(ury) + " cm\n";
    case 270:
      return "0 -1 1 0 " + Fmt(llx) + " " + Fmt(ury) + " cm\n";
    default:
      return "1 0 0 1 " + Fmt(llx) + " " + Fmt(lly) + " cm\n";
  }
}

std::string BannerContent(const Page& page, const std::string& font,
                          const std::vector<std::string>& winansi_lines) {
  const double w = page.box[2] - page.box[0];
  const double h = page.box[3] - page.box[1];
  const bool sideways = page.rotate == 90 || page.rotate == 270;
  const double vis_w = sideways ? h : w;
  const double vis_h = sideways ? w : h;

  double text_w = 0;
  for (const auto& l : winansi_lines) {
    text_w = std::max(text_w, HelveticaWidth(l) * kBannerFontSize / 1000.0);
  }
  const double n = static_cast<double>(winansi_lines.size());
  const double box_w = text_w + 2 * kPadding;
  const double box_h = 2 * kPadding + kBannerFontSize + (n - 1) * kLeading;
  const double margin =
      std::max(0.0, std::min(kMaxMargin, 0.05 * std::min(vis_w, vis_h)));
  double scale = 1.0;
  if (box_w > 0) scale = std::min(scale, (vis_w - 2 * margin) / box_w);
  scale = std::min(scale, 0.4 * vis_h / box_h);
  if (scale <= 0) scale = 0.01;
  const double x = (vis_w - scale * box_w) / 2;
  const double y = margin;

  std::string s;
  s += "Q\nq\n";
  s += RotationMatrix(page.box, page.rotate);
  s += Fmt(scale) + " 0 0 " + Fmt(scale) + " " + Fmt(x) + " " + Fmt(y) +
       " cm\n";
  s += "0.97 g\n0 0 " + Fmt(box_w) + " " + Fmt(box_h) + " re\nf\n";
  s += "0.45 G\n0.6 w\n0 0 " + Fmt(box_w) + " " + Fmt(box_h) + " re\nS\n";
  s += "BT\n/" + font + " " + Fmt(kBannerFontSize) + " Tf\n0.1 g\n" +
       Fmt(kLeading) + " TL\n";
  s += Fmt(kPadding) + " " +
       Fmt(box_h - kPadding - kAscent * kBannerFontSize) + " Td\n";
  for (std::size_t i = 0; i < winansi_lines.size(); ++i) {
    if (i) s += "T*\n";
    s += LiteralString(winansi_lines[i]) + " Tj\n";
  }
  s += "ET\nQ\n";
  return s;
}

class UpdateWriter {
 public:
  explicit UpdateWriter(std::size_t base) : base_(base) { out_ = "\n"; }

  void AddObject(Ref ref, const Object& obj) {
    offsets_[ref.num] = {base_ + out_.size(), ref.gen};
    out_ += std::to_string(ref.num) + " " + std::to_string(ref.gen) + " obj\n";
    WriteObject(obj, out_);
    out_ += "\nendobj\n";
  }

  void AddStream(Ref ref, const std::string& data) {
    offsets_[ref.num] = {base_ + out_.size(), ref.gen};
    out_ += std::to_string(ref.num) + " " + std::to_string(ref.gen) +
            " obj\n<< /Length " + std::to_string(data.size()) +
            " >>\nstream\n" + data + "\nendstream\nendobj\n";
  }

  // Adds entries for objects of the original that the update keeps.
  void AddExisting(int num, std::size_t offset, int gen) {
    offsets_.emplace(num, std::pair{offset, gen});
  }

  std::string Finish(Dict trailer) {
    const std::size_t xref_offset = base_ + out_.size();
    std::map<int, std::string> lines;
    for (const auto& [num, entry] : offsets_) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%010zu %05d n \n", entry.first,
                    entry.second);
      lines[num] = buf;
    }
    lines[0] = "0000000000 65535 f \n";
    out_ += "xref\n";
    for (auto it = lines.begin(); it != lines.end();) {
      auto end = std::next(it);
      int last = it->first;
      while (end != lines.end() && end->first == last + 1) {
        last = end->first;
        ++end;
      }
      out_ += std::to_string(it->first) + " " +
              std::to_string(last - it->first + 1) + "\n";
      for (; it != end; ++it) out_ += it->second;
    }
    out_ += "trailer\n";
    WriteObject(trailer, out_);
    out_ += "\nstartxref\n" + std::to_string(xref_offset) + "\n%%EOF\n";
    return std::move(out_);
  }

 private:
  std::size_t base_;
  std::string out_;
  std::map<int, std::pair<std::size_t, int>> offsets_;
};

}  // namespace

double HelveticaWidth(std::string_view text) {
  double w = 0;
  for (unsigned char c : text) {
    w += (c >= 0x20 && c <= 0x7E) ? kAsciiWidths[c - 0x20] : 556;
  }
  return w;
}

std::string ToWinAnsi(std::string_view utf8) {
  static const std::map<std::uint32_t, unsigned char> kCp1252 = {
      {0x20AC, 0x80}, {0x201A, 0x82}, {0x0192, 0x83}, {0x201E, 0x84},
      {0x2026, 0x85}, {0x2020, 0x86}, {0x2021, 0x87}, {0x02C6, 0x88},
      {0x2030, 0x89}, {0x0160, 0x8A}, {0x2039, 0x8B}, {0x0152, 0x8C},
      {0x017D, 0x8E}, {0x2018, 0x91}, {0x2019, 0x92}, {0x201C, 0x93},
      {0x201D, 0x94}, {0x2022, 0x95}, {0x2013, 0x96}, {0x2014, 0x97},
      {0x02DC, 0x98}, {0x2122, 0x99}, {0x0161, 0x9A}, {0x203A, 0x9B},
      {0x0153, 0x9C}, {0x017E, 0x9E}, {0x0178, 0x9F}};
  std::string out;
  std::size_t i = 0;
  while (i < utf8.size()) {
    const unsigned char c = static_cast<unsigned char>(utf8[i]);
    std::uint32_t cp = c;
    std::size_t len = 1;
    if (c >= 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else if (c >= 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if (c >= 0xC0) {
      len = 2;
      cp = c & 0x1F;
    }
    for (std::size_t k = 1; k < len && i + k < utf8.size(); ++k) {
      cp = (cp << 6) | (static_cast<unsigned char>(utf8[i + k]) & 0x3F);
    }
    i += len;
    if ((cp >= 0x20 && cp <= 0x7E) || (cp >= 0xA0 && cp <= 0xFF)) {
      out += static_cast<char>(cp);
    } else if (const auto it = kCp1252.find(cp); it != kCp1252.end()) {
      out += static_cast<char>(it->second);
    } else {
      out += '?';
    }
  }
  return out;
}

std::string BuildBannerUpdate(std::string_view original,
                              const std::vector<std::string>& lines) {
  if (lines.empty()) {
    throw Error(ErrorCode::kInvalidBanner, "banner needs at least one line");
  }
  const Document doc = Document::Open(original);
  if (doc.encrypted()) {
    throw Error(ErrorCode::kUnsupportedPdf, "encrypted PDFs are not supported");
  }
  const std::vector<Page> pages = doc.Pages();

  std::vector<std::string> winansi;
  for (const auto& l : lines) winansi.push_back(Truncate(ToWinAnsi(l)));

  int next = doc.next_object_number();
  const Ref font_ref{next++, 0};
  const Ref save_ref{next++, 0};

  UpdateWriter writer(original.size());
  Dict font;
  font.Set("Type", Name{"Font"});
  font.Set("Subtype", Name{"Type1"});
  font.Set("BaseFont", Name{"Helvetica"});
  font.Set("Encoding", Name{"WinAnsiEncoding"});
  writer.AddObject(font_ref, font);
  writer.AddStream(save_ref, "q");

  for (const Page& page : pages) {
    Dict fonts;
    if (const Object* f = page.resources.Get("Font")) {
      const Object resolved = doc.Resolve(*f);
      if (resolved.is_dict()) fonts = resolved.as_dict();
    }
    std::string font_name = "IDSignBanner";
    for (int k = 1; fonts.Contains(font_name); ++k) {
      font_name = "IDSignBanner" + std::to_string(k);
    }
    fonts.Set(font_name, font_ref);
    Dict resources = page.resources;
    resources.Set("Font", std::move(fonts));

    Array contents{save_ref};
    if (const Object* c = page.dict.Get("Contents")) {
      if (c->is_ref()) {
        const auto loaded = doc.Load(c->as_ref());
        if (loaded && loaded->stream) {
          contents.push_back(*c);
        } else if (loaded && loaded->object.is_array()) {
          for (const Object& item : loaded->object.as_array()) {
            contents.push_back(item);
          }
        }
      } else if (c->is_array()) {
        for (const Object& item : c->as_array()) contents.push_back(item);
      }
    }
    const Ref banner_ref{next++, 0};
    writer.AddStream(banner_ref, BannerContent(page, font_name, winansi));
    contents.push_back(banner_ref);

    Dict rewritten = page.dict;
    rewritten.Set("Resources", std::move(resources));
    rewritten.Set("Contents", std::move(contents));
    writer.AddObject(page.ref, rewritten);
  }

  Dict trailer;
  trailer.Set("Size", next);
  for (const char* key : {"Root", "Info", "ID"}) {
    if (const Object* v = doc.trailer().Get(key)) trailer.Set(key, *v);
  }
  if (doc.repaired()) {
    for (const auto& [num, entry] : doc.xref()) {
      if (entry.kind == XrefEntry::Kind::kCompressed) {
        throw Error(ErrorCode::kUnsupportedPdf,
                    "damaged cross-reference data with object streams");
      }
      if (entry.kind == XrefEntry::Kind::kInFile) {
        writer.AddExisting(num, static_cast<std::size_t>(entry.offset),
                           entry.gen);
      }
    }
    return writer.Finish(std::move(trailer));
  }
  trailer.Set("Prev", Object(static_cast<std::int64_t>(doc.startxref())));
  return writer.Finish(std::move(trailer));
}

}  // namespace idsign::pdf
