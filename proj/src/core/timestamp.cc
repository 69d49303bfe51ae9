#include "idsign/timestamp.h"

#include <charconv>
#include <cstdio>

#include "idsign/error.h"

namespace idsign {

namespace {

bool ParseDigits(std::string_view text, std::size_t pos, std::size_t len,
                 int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len,
                                   out);
  return ec == std::errc() && ptr == text.data() + pos + len;
}

}  // namespace

Timestamp Timestamp::Parse(std::string_view text) {
  using namespace std::chrono;
  // YYYY-MM-DDTHH:MM:SSZ
  int y, mo, d, h, mi, s;
  const bool shape_ok = text.size() == 20 && text[4] == '-' &&
                        text[7] == '-' && text[10] == 'T' && text[13] == ':' &&
                        text[16] == ':' && text[19] == 'Z';
  if (!shape_ok || !ParseDigits(text, 0, 4, y) ||
      !ParseDigits(text, 5, 2, mo) || !ParseDigits(text, 8, 2, d) ||
      !ParseDigits(text, 11, 2, h) || !ParseDigits(text, 14, 2, mi) ||
      !ParseDigits(text, 17, 2, s)) {
    throw Error(ErrorCode::kMalformedTimestamp, std::string(text));
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw Error(ErrorCode::kMalformedTimestamp, std::string(text));
  }
  return Timestamp(sys_days{ymd} + hours{h} + minutes{mi} + seconds{s});
}

Timestamp Timestamp::Now() {
  return Timestamp(
      std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

Timestamp Timestamp::FromUnixSeconds(std::int64_t seconds) {
  return Timestamp(std::chrono::sys_seconds{std::chrono::seconds{seconds}});
}

std::string Timestamp::ToString() const {
  using namespace std::chrono;
  const auto day_start = floor<days>(instant_);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{instant_ - day_start};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()),
                static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

}  // namespace idsign
