#include "paravmo/dyadic_rational.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace paravmo {

namespace {

std::int64_t shifted_left(std::int64_t value, int shift) {
  if (shift == 0 || value == 0) return value;
  if (shift >= 62) throw std::overflow_error("dyadic rational: exponent gap too large");
  const std::int64_t limit = std::numeric_limits<std::int64_t>::max() >> shift;
  if (value > limit || value < -limit) throw std::overflow_error("dyadic rational: mantissa overflow");
  return value * (std::int64_t{1} << shift);
}

}  // namespace

DyadicRational::DyadicRational(std::int64_t mantissa, int exponent)
    : mantissa_(mantissa), exponent_(exponent) {
  normalize();
}

void DyadicRational::normalize() {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  while ((mantissa_ & 1) == 0) {
    mantissa_ /= 2;
    ++exponent_;
  }
}

DyadicRational DyadicRational::from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("dyadic rational: non-finite value");
  if (value == 0.0) return {};
  int exp = 0;
  const double frac = std::frexp(value, &exp);  // value = frac * 2^exp, |frac| in [0.5, 1)
  const auto mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
  return {mantissa, exp - 53};
}

double DyadicRational::to_double() const {
  return std::ldexp(static_cast<double>(mantissa_), exponent_);
}

long double DyadicRational::to_long_double() const {
  return std::ldexp(static_cast<long double>(mantissa_), exponent_);
}

std::string DyadicRational::to_string() const {
  std::ostringstream out;
  if (exponent_ >= 0) {
    out << mantissa_ << "*2^" << exponent_;
  } else {
    out << mantissa_ << "/2^" << -exponent_;
  }
  return out.str();
}

DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const int e = std::min(a.exponent_, b.exponent_);
  const std::int64_t ma = shifted_left(a.mantissa_, a.exponent_ - e);
  const std::int64_t mb = shifted_left(b.mantissa_, b.exponent_ - e);
  std::int64_t sum = 0;
  if (__builtin_add_overflow(ma, mb, &sum)) throw std::overflow_error("dyadic rational: sum overflow");
  return {sum, e};
}

DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) { return a + (-b); }

DyadicRational operator*(const DyadicRational& a, const DyadicRational& b) {
  std::int64_t product = 0;
  if (__builtin_mul_overflow(a.mantissa_, b.mantissa_, &product)) {
    throw std::overflow_error("dyadic rational: product overflow");
  }
  return {product, a.exponent_ + b.exponent_};
}

std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
  const int s = (a - b).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace paravmo
