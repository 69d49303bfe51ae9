#ifndef IDSIGN_TIMESTAMP_H_
#define IDSIGN_TIMESTAMP_H_

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace idsign {

// A UTC instant with whole-second precision. Renders as RFC 3339
// "YYYY-MM-DDTHH:MM:SSZ"; nothing else is accepted by Parse.
class Timestamp {
 public:
  Timestamp() = default;
  explicit Timestamp(std::chrono::sys_seconds instant) : instant_(instant) {}

  static Timestamp Parse(std::string_view text);
  static Timestamp Now();
  static Timestamp FromUnixSeconds(std::int64_t seconds);

  std::string ToString() const;
  std::chrono::sys_seconds instant() const { return instant_; }
  std::int64_t unix_seconds() const {
    return instant_.time_since_epoch().count();
  }

  Timestamp operator+(std::chrono::seconds d) const {
    return Timestamp(instant_ + d);
  }
  Timestamp operator-(std::chrono::seconds d) const {
    return Timestamp(instant_ - d);
  }
  std::chrono::seconds operator-(const Timestamp& other) const {
    return instant_ - other.instant_;
  }

  auto operator<=>(const Timestamp&) const = default;

 private:
  std::chrono::sys_seconds instant_{};
};

}  // namespace idsign

#endif  // IDSIGN_TIMESTAMP_H_
