#include "paravmo/simple_function.hpp"

#include <algorithm>
#include <stdexcept>

namespace paravmo {

namespace {

void require_same_size(const SimpleFunction& a, const SimpleFunction& b) {
  if (a.size() != b.size()) throw std::invalid_argument("simple function: leaf count mismatch");
}

}  // namespace

SimpleFunction SimpleFunction::from_real(std::span<const double> values) {
  std::vector<Complex> v(values.begin(), values.end());
  return SimpleFunction(std::move(v));
}

SimpleFunction SimpleFunction::constant(std::size_t leaf_count, Complex value) {
  return SimpleFunction(std::vector<Complex>(leaf_count, value));
}

SimpleFunction SimpleFunction::indicator(const DyadicTree& tree, CubeId q, Complex value) {
  SimpleFunction f(tree.leaf_count());
  const LeafRange r = tree.leaves(q);
  std::fill(f.values_.begin() + static_cast<std::ptrdiff_t>(r.begin),
            f.values_.begin() + static_cast<std::ptrdiff_t>(r.end), value);
  return f;
}

bool SimpleFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](Complex v) { return v == Complex{}; });
}

SimpleFunction& SimpleFunction::operator+=(const SimpleFunction& other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

SimpleFunction& SimpleFunction::operator-=(const SimpleFunction& other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

SimpleFunction& SimpleFunction::operator*=(Complex scale) {
  for (Complex& v : values_) v *= scale;
  return *this;
}

SimpleFunction SimpleFunction::times(const SimpleFunction& other) const {
  require_same_size(*this, other);
  SimpleFunction out(*this);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] *= other.values_[i];
  return out;
}

SimpleFunction SimpleFunction::restricted(const DyadicTree& tree, CubeId q) const {
  SimpleFunction out(values_.size());
  const LeafRange r = tree.leaves(q);
  for (std::size_t i = r.begin; i < r.end; ++i) out.values_[i] = values_[i];
  return out;
}

}  // namespace paravmo
