#ifndef IDSIGN_PDF_FILTERS_H_
#define IDSIGN_PDF_FILTERS_H_

#include <string>
#include <string_view>

#include "idsign/pdf/object.h"

namespace idsign::pdf {

// zlib inflate. Truncated input yields whatever could be decoded.
std::string FlateDecode(std::string_view data);
std::string FlateEncode(std::string_view data);

// Applies the stream's /Filter chain (FlateDecode only, with PNG
// predictors). Throws Error(kUnsupportedPdf) for other filters.
std::string DecodeStream(const Stream& stream);

}  // namespace idsign::pdf

#endif  // IDSIGN_PDF_FILTERS_H_
