#include "peg/decimal.hpp"

#include <algorithm>

#include "peg/errors.hpp"

namespace peg {

namespace {

constexpr int kMaxDigits = 18;

Int128 pow10(int n) {
  Int128 r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

bool parse_into(std::string_view text, Int128& mantissa, int& scale) {
  if (text.empty()) return false;
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    i = 1;
  }
  Int128 m = 0;
  int digits = 0;
  int frac = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (seen_point) return false;
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') return false;
    any_digit = true;
    if (m != 0 || c != '0') ++digits;
    if (digits > kMaxDigits) return false;
    m = m * 10 + (c - '0');
    if (seen_point && ++frac > kMaxDigits) return false;
  }
  if (!any_digit) return false;
  mantissa = negative ? -m : m;
  scale = frac;
  return true;
}

}  // namespace

Decimal::Decimal(Int128 mantissa, int scale) : mantissa_(mantissa), scale_(scale) {
  normalize();
}

void Decimal::normalize() {
  if (mantissa_ == 0) {
    scale_ = 0;
    return;
  }
  while (scale_ > 0 && mantissa_ % 10 == 0) {
    mantissa_ /= 10;
    --scale_;
  }
}

Decimal Decimal::parse(std::string_view text) {
  Int128 m = 0;
  int scale = 0;
  if (!parse_into(text, m, scale)) {
    throw MalformedNumber("not a decimal number: '" + std::string(text) + "'");
  }
  return Decimal(m, scale);
}

bool Decimal::is_valid(std::string_view text) noexcept {
  Int128 m = 0;
  int scale = 0;
  return parse_into(text, m, scale);
}

Decimal Decimal::operator*(const Decimal& other) const {
  Int128 limit = pow10(kMaxDigits);
  Int128 a = mantissa_ < 0 ? -mantissa_ : mantissa_;
  Int128 b = other.mantissa_ < 0 ? -other.mantissa_ : other.mantissa_;
  // Both operands are below 10^18, so the product fits in 128 bits.
  Decimal r(mantissa_ * other.mantissa_, scale_ + other.scale_);
  Int128 abs_r = r.mantissa_ < 0 ? -r.mantissa_ : r.mantissa_;
  if (a >= limit || b >= limit || abs_r >= limit || r.scale_ > kMaxDigits) {
    throw MalformedNumber("decimal product overflows 18 significant digits");
  }
  return r;
}

std::string Decimal::to_string() const {
  Int128 m = mantissa_ < 0 ? -mantissa_ : mantissa_;
  std::string digits;
  do {
    digits.push_back(static_cast<char>('0' + static_cast<int>(m % 10)));
    m /= 10;
  } while (m != 0);
  while (static_cast<int>(digits.size()) <= scale_) digits.push_back('0');
  std::reverse(digits.begin(), digits.end());
  if (scale_ > 0) digits.insert(digits.size() - scale_, 1, '.');
  if (mantissa_ < 0) digits.insert(digits.begin(), '-');
  return digits;
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  int s = std::max(a.scale_, b.scale_);
  Int128 x = a.mantissa_ * pow10(s - a.scale_);
  Int128 y = b.mantissa_ * pow10(s - b.scale_);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace peg
