#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace paravmo {

/// Exact number of the form mantissa * 2^exponent.
///
/// Cube geometry uses it so that predicates never depend on floating-point
/// rounding. Arithmetic throws std::overflow_error instead of wrapping.
class DyadicRational {
 public:
  constexpr DyadicRational() = default;
  DyadicRational(std::int64_t mantissa, int exponent);

  static DyadicRational integer(std::int64_t value) { return {value, 0}; }
  static DyadicRational pow2(int exponent) { return {1, exponent}; }
  /// Exact conversion; throws std::invalid_argument for non-finite input.
  static DyadicRational from_double(double value);

  std::int64_t mantissa() const { return mantissa_; }
  int exponent() const { return exponent_; }

  double to_double() const;
  long double to_long_double() const;
  std::string to_string() const;

  bool is_zero() const { return mantissa_ == 0; }
  int sign() const { return (mantissa_ > 0) - (mantissa_ < 0); }
  DyadicRational abs() const { return {mantissa_ < 0 ? -mantissa_ : mantissa_, exponent_}; }

  friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b);
  friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b);
  friend DyadicRational operator*(const DyadicRational& a, const DyadicRational& b);
  DyadicRational operator-() const { return {-mantissa_, exponent_}; }

  friend bool operator==(const DyadicRational& a, const DyadicRational& b) = default;
  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b);

 private:
  void normalize();

  std::int64_t mantissa_ = 0;
  int exponent_ = 0;
};

}  // namespace paravmo
