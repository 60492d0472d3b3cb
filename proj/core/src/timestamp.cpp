#include "peg/timestamp.hpp"

#include <charconv>
#include <cstdio>

#include "peg/errors.hpp"

namespace peg {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto r = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return r.ec == std::errc{};
}

}  // namespace

std::optional<Timestamp> Timestamp::try_parse(std::string_view s) noexcept {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  Timestamp ts;
  ts.instant_ = sys_days{ymd};
  if (s.size() == 10) return ts;

  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (s.size() != 16 && s.size() != 19) return std::nullopt;
  if (s[13] != ':' || !read_int(s, 11, 2, hh) || !read_int(s, 14, 2, mm)) {
    return std::nullopt;
  }
  if (s.size() == 19 && (s[16] != ':' || !read_int(s, 17, 2, ss))) {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  ts.instant_ += hours{hh} + minutes{mm} + seconds{ss};
  ts.has_time_ = true;
  return ts;
}

Timestamp Timestamp::parse(std::string_view text) {
  if (auto ts = try_parse(text)) return *ts;
  throw ModelError("not an ISO-8601 date or date-time: '" + std::string(text) + "'");
}

Timestamp Timestamp::from_date(std::chrono::year_month_day ymd) {
  Timestamp ts;
  ts.instant_ = std::chrono::sys_days{ymd};
  return ts;
}

std::string Timestamp::to_string() const {
  using namespace std::chrono;
  auto days = floor<std::chrono::days>(instant_);
  year_month_day ymd{days};
  char buf[32];
  if (!has_time_) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }
  hh_mm_ss tod{instant_ - days};
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

}  // namespace peg
