#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace peg {

__extension__ using Int128 = __int128;

// Exact scaled decimal: value == mantissa * 10^-scale.
//
// Used for unit conversion so that "12 g/dL * 10" renders as "120" rather
// than whatever a binary double would print. Values are kept normalized
// (no trailing zero digits in the mantissa when scale > 0), which makes
// structural equality coincide with numeric equality.
class Decimal {
 public:
  Decimal() = default;

  // Accepts [+-]digits[.digits]. Throws MalformedNumber otherwise, or when
  // the value does not fit in 18 significant digits.
  static Decimal parse(std::string_view text);
  static bool is_valid(std::string_view text) noexcept;

  // Throws MalformedNumber on overflow.
  Decimal operator*(const Decimal& other) const;

  bool is_positive() const noexcept { return mantissa_ > 0; }

  // Canonical rendering: no exponent, no trailing zeros, "-0" never appears.
  std::string to_string() const;

  friend bool operator==(const Decimal&, const Decimal&) = default;
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

 private:
  Decimal(Int128 mantissa, int scale);
  void normalize();

  Int128 mantissa_ = 0;
  int scale_ = 0;
};

}  // namespace peg
