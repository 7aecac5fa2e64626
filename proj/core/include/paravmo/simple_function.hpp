#pragma once

#include <complex>
#include <span>
#include <vector>

#include "paravmo/tree.hpp"

namespace paravmo {

using Complex = std::complex<double>;

/// Leaf-constant complex function on a DyadicTree: one value per leaf in
/// canonical order. Carries no reference to its tree; operations that need
/// geometry take the tree (or a Measure) explicitly.
class SimpleFunction {
 public:
  SimpleFunction() = default;
  explicit SimpleFunction(std::size_t leaf_count) : values_(leaf_count) {}
  explicit SimpleFunction(std::vector<Complex> values) : values_(std::move(values)) {}
  static SimpleFunction from_real(std::span<const double> values);
  static SimpleFunction constant(std::size_t leaf_count, Complex value);
  /// value * 1_Q.
  static SimpleFunction indicator(const DyadicTree& tree, CubeId q, Complex value = 1.0);

  std::size_t size() const { return values_.size(); }
  std::span<const Complex> values() const { return values_; }
  std::span<Complex> values() { return values_; }
  Complex operator[](std::size_t leaf) const { return values_[leaf]; }
  Complex& operator[](std::size_t leaf) { return values_[leaf]; }

  bool is_zero() const;

  SimpleFunction& operator+=(const SimpleFunction& other);
  SimpleFunction& operator-=(const SimpleFunction& other);
  SimpleFunction& operator*=(Complex scale);

  friend SimpleFunction operator+(SimpleFunction a, const SimpleFunction& b) { return a += b; }
  friend SimpleFunction operator-(SimpleFunction a, const SimpleFunction& b) { return a -= b; }
  friend SimpleFunction operator*(Complex s, SimpleFunction a) { return a *= s; }
  friend SimpleFunction operator*(SimpleFunction a, Complex s) { return a *= s; }

  /// Pointwise product.
  SimpleFunction times(const SimpleFunction& other) const;
  /// 1_Q f.
  SimpleFunction restricted(const DyadicTree& tree, CubeId q) const;

  friend bool operator==(const SimpleFunction&, const SimpleFunction&) = default;

 private:
  std::vector<Complex> values_;
};

}  // namespace paravmo
