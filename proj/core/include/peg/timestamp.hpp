#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace peg {

// A calendar date or a date-time, at second resolution.
//
// Ordering and equality are chronological: a day-granular value sits at
// midnight of that day. Granularity only affects rendering and literal typing.
class Timestamp {
 public:
  using Seconds = std::chrono::sys_seconds;

  Timestamp() = default;

  // ISO-8601: YYYY-MM-DD, or YYYY-MM-DD(T| )HH:MM[:SS]. Throws ModelError.
  static Timestamp parse(std::string_view text);
  static std::optional<Timestamp> try_parse(std::string_view text) noexcept;

  static Timestamp from_date(std::chrono::year_month_day ymd);

  Seconds instant() const noexcept { return instant_; }
  bool has_time_of_day() const noexcept { return has_time_; }

  // "2012-01-01" or "2012-01-01T08:30:00".
  std::string to_string() const;

  friend bool operator==(const Timestamp& a, const Timestamp& b) noexcept {
    return a.instant_ == b.instant_;
  }
  friend std::strong_ordering operator<=>(const Timestamp& a,
                                          const Timestamp& b) noexcept {
    return a.instant_ <=> b.instant_;
  }

 private:
  Seconds instant_{};
  bool has_time_ = false;
};

}  // namespace peg
