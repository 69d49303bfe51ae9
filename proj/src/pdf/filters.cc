#include "idsign/pdf/filters.h"

#include <zlib.h>

#include <cstdlib>

#include "idsign/error.h"

namespace idsign::pdf {

namespace {

std::int64_t IntParam(const Dict* params, std::string_view key,
                      std::int64_t fallback) {
  if (params == nullptr) return fallback;
  const Object* v = params->Get(key);
  return v != nullptr && v->is_int() ? v->as_int() : fallback;
}

std::string UndoPngPredictor(std::string_view data, int colors, int bpc,
                             int columns) {
  const std::size_t bpp =
      std::max<std::size_t>(1, static_cast<std::size_t>(colors * bpc) / 8);
  const std::size_t row_len =
      (static_cast<std::size_t>(colors) * bpc * columns + 7) / 8;
  std::string out;
  std::string prev(row_len, '\0');
  std::size_t pos = 0;
  while (pos + 1 + row_len <= data.size()) {
    const unsigned char type = static_cast<unsigned char>(data[pos]);
    std::string row(data.substr(pos + 1, row_len));
    for (std::size_t i = 0; i < row_len; ++i) {
      const int left = i >= bpp ? static_cast<unsigned char>(row[i - bpp]) : 0;
      const int up = static_cast<unsigned char>(prev[i]);
      const int up_left =
          i >= bpp ? static_cast<unsigned char>(prev[i - bpp]) : 0;
      int add = 0;
      switch (type) {
        case 0: break;
        case 1: add = left; break;
        case 2: add = up; break;
        case 3: add = (left + up) / 2; break;
        case 4: {
          const int p = left + up - up_left;
          const int pa = std::abs(p - left);
          const int pb = std::abs(p - up);
          const int pc = std::abs(p - up_left);
          add = (pa <= pb && pa <= pc) ? left : (pb <= pc ? up : up_left);
          break;
        }
        default:
          throw Error(ErrorCode::kMalformedPdf, "bad PNG predictor row type");
      }
      row[i] = static_cast<char>(static_cast<unsigned char>(row[i]) + add);
    }
    out += row;
    prev = std::move(row);
    pos += 1 + row_len;
  }
  return out;
}

std::string ApplyPredictor(std::string data, const Dict* params) {
  const std::int64_t predictor = IntParam(params, "Predictor", 1);
  if (predictor <= 1) return data;
  if (predictor < 10) {
    throw Error(ErrorCode::kUnsupportedPdf, "TIFF predictor not supported");
  }
  return UndoPngPredictor(data, static_cast<int>(IntParam(params, "Colors", 1)),
                          static_cast<int>(IntParam(params, "BitsPerComponent", 8)),
                          static_cast<int>(IntParam(params, "Columns", 1)));
}

}  // namespace

std::string FlateDecode(std::string_view data) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) {
    throw Error(ErrorCode::kMalformedPdf, "inflateInit failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[16384];
  int rc;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    out.append(buf, sizeof buf - zs.avail_out);
  } while (rc == Z_OK);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END && out.empty()) {
    throw Error(ErrorCode::kMalformedPdf, "corrupt Flate stream");
  }
  return out;
}

std::string FlateEncode(std::string_view data) {
  uLongf len = compressBound(static_cast<uLong>(data.size()));
  std::string out(len, '\0');
  if (compress2(reinterpret_cast<Bytef*>(out.data()), &len,
                reinterpret_cast<const Bytef*>(data.data()),
                static_cast<uLong>(data.size()), Z_BEST_COMPRESSION) != Z_OK) {
    throw Error(ErrorCode::kMalformedPdf, "compress failed");
  }
  out.resize(len);
  return out;
}

std::string DecodeStream(const Stream& stream) {
  const Object* filter = stream.dict.Get("Filter");
  const Object* parms = stream.dict.Get("DecodeParms");
  if (filter == nullptr || filter->is_null()) return stream.data;

  std::vector<std::string> filters;
  std::vector<const Dict*> params;
  if (filter->is_name()) {
    filters.push_back(filter->as_name().value);
    params.push_back(parms != nullptr && parms->is_dict() ? &parms->as_dict()
                                                          : nullptr);
  } else if (filter->is_array()) {
    const Array& arr = filter->as_array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_name()) {
        throw Error(ErrorCode::kMalformedPdf, "filter is not a name");
      }
      filters.push_back(arr[i].as_name().value);
      const Dict* p = nullptr;
      if (parms != nullptr && parms->is_array() &&
          i < parms->as_array().size() && parms->as_array()[i].is_dict()) {
        p = &parms->as_array()[i].as_dict();
      }
      params.push_back(p);
    }
  }

  std::string data = stream.data;
  for (std::size_t i = 0; i < filters.size(); ++i) {
    if (filters[i] == "FlateDecode" || filters[i] == "Fl") {
      data = ApplyPredictor(FlateDecode(data), params[i]);
    } else {
      throw Error(ErrorCode::kUnsupportedPdf,
                  "stream filter " + filters[i] + " not supported here");
    }
  }
  return data;
}

}  // namespace idsign::pdf
