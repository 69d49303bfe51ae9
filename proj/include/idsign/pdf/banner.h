#ifndef IDSIGN_PDF_BANNER_H_
#define IDSIGN_PDF_BANNER_H_

#include <string>
#include <string_view>
#include <vector>

namespace idsign::pdf {

inline constexpr double kBannerFontSize = 9.0;

// Builds the incremental update that draws |lines| in a boxed footer at the
// bottom margin of every page of |original|. The result is meant to be
// appended to |original| verbatim and is a pure function of its inputs.
//
// Each page object is rewritten with its content wrapped in q/Q, the banner
// stream appended and a Helvetica font added to its resources. The update
// ends with a classic cross-reference table chained to the original via
// /Prev (or a full table when the original's cross-reference data was
// unusable).
//
// Throws Error(kUnsupportedPdf) for encrypted files, Error(kMalformedPdf)
// when no page tree can be recovered.
std::string BuildBannerUpdate(std::string_view original,
                              const std::vector<std::string>& lines);

// Helvetica advance width of |text| in 1/1000 em; |text| is WinAnsi.
double HelveticaWidth(std::string_view text);

// Converts UTF-8 to WinAnsiEncoding, replacing unmappable characters with
// '?'.
std::string ToWinAnsi(std::string_view utf8);

}  // namespace idsign::pdf

#endif  // IDSIGN_PDF_BANNER_H_
