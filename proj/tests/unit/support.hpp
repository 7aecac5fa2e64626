#pragma once

// Brute-force reference computations. They walk leaf ranges and cube lists
// directly and share no code with the library routines they check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "paravmo/measure.hpp"
#include "paravmo/random.hpp"
#include "paravmo/simple_function.hpp"

namespace oracle {

using paravmo::Complex;
using paravmo::CubeId;
using paravmo::Measure;
using paravmo::SimpleFunction;

inline paravmo::TreePtr unit_tree(int depth, int dim = 1) { return paravmo::DyadicTree::unit(depth, dim); }

inline Measure weighted(paravmo::TreePtr tree, std::vector<double> w) { return {std::move(tree), std::move(w)}; }

inline Measure random_measure(paravmo::TreePtr tree, std::uint64_t seed, double zero_fraction = 0.0) {
  paravmo::Rng rng(seed);
  std::vector<double> w(tree->leaf_count());
  for (double& x : w) x = rng.uniform() < zero_fraction ? 0.0 : rng.uniform(0.05, 1.0);
  return {std::move(tree), std::move(w)};
}

inline SimpleFunction random_function(std::size_t n, std::uint64_t seed, bool complex_values = false) {
  paravmo::Rng rng(seed);
  SimpleFunction f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = complex_values ? Complex(rng.normal(), rng.normal()) : rng.normal();
  return f;
}

inline double mass(const Measure& mu, std::size_t begin, std::size_t end) {
  double m = 0.0;
  for (std::size_t i = begin; i < end; ++i) m += mu.weight(i);
  return m;
}

inline Complex average(const SimpleFunction& f, const Measure& mu, std::size_t begin, std::size_t end) {
  const double m = mass(mu, begin, end);
  if (m == 0.0) return 0.0;
  Complex s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += f[i] * mu.weight(i);
  return s / m;
}

inline Complex average(const SimpleFunction& f, const Measure& mu, CubeId q) {
  const auto r = mu.tree().leaves(q);
  return average(f, mu, r.begin, r.end);
}

inline double osc(const SimpleFunction& b, const Measure& mu, CubeId q, double p) {
  const auto r = mu.tree().leaves(q);
  const double m = mass(mu, r.begin, r.end);
  if (m == 0.0) return 0.0;
  const Complex a = average(b, mu, q);
  double s = 0.0;
  for (std::size_t i = r.begin; i < r.end; ++i) s += std::pow(std::abs(b[i] - a), p) * mu.weight(i);
  return std::pow(s / m, 1.0 / p);
}

inline double lp(const SimpleFunction& f, const Measure& mu, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p) * mu.weight(i);
  return std::pow(s, 1.0 / p);
}

/// Child of q containing leaf x, found by scanning the children list.
inline CubeId child_of(const paravmo::DyadicTree& t, CubeId q, std::size_t x) {
  for (CubeId c : t.children(q)) {
    if (t.leaves(c).contains(x)) return c;
  }
  return q;
}

/// Dense matrix of the paraproduct, entry by entry from the defining sum.
inline Eigen::MatrixXcd paraproduct_matrix(const SimpleFunction& b, const std::vector<CubeId>& cubes,
                                           const Measure& mu) {
  const auto& t = mu.tree();
  const auto n = static_cast<Eigen::Index>(mu.leaf_count());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (CubeId q : cubes) {
    const auto r = t.leaves(q);
    const double m = mass(mu, r.begin, r.end);
    if (m == 0.0) continue;
    const Complex aq = average(b, mu, q);
    for (std::size_t x = r.begin; x < r.end; ++x) {
      const Complex d = average(b, mu, child_of(t, q, x)) - aq;
      for (std::size_t y = r.begin; y < r.end; ++y) {
        a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += d * mu.weight(y) / m;
      }
    }
  }
  return a;
}

/// Largest eigenvalue of B^* B with B = W^(1/2) A W^(-1/2) on positive leaves,
/// through a self-adjoint eigensolver.
inline double l2_norm(const Eigen::MatrixXcd& a, const Measure& mu) {
  std::vector<Eigen::Index> s;
  for (std::size_t i = 0; i < mu.leaf_count(); ++i) {
    if (mu.weight(i) > 0.0) s.push_back(static_cast<Eigen::Index>(i));
  }
  const auto k = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXcd b(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      b(i, j) = a(s[i], s[j]) * std::sqrt(mu.weight(s[i]) / mu.weight(s[j]));
    }
  }
  if (k == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b.adjoint() * b);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// L^inf_gamma by trying every B in {0} and the values |f| on Q.
inline double linfty_gamma(const SimpleFunction& f, const Measure& mu, CubeId q, double gamma) {
  const auto r = mu.tree().leaves(q);
  const double m = mass(mu, r.begin, r.end);
  if (m == 0.0) return 0.0;
  std::vector<double> candidates{0.0};
  for (std::size_t i = r.begin; i < r.end; ++i) candidates.push_back(std::abs(f[i]));
  std::sort(candidates.begin(), candidates.end());
  for (double b : candidates) {
    double above = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      if (std::abs(f[i]) > b) above += mu.weight(i);
    }
    if (above <= gamma * m * (1 + 1e-12)) return b;
  }
  return candidates.back();
}

inline double weak_l1(const SimpleFunction& f, const Measure& mu, CubeId q) {
  const auto r = mu.tree().leaves(q);
  double best = 0.0;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    const double lambda = std::abs(f[i]);
    double m = 0.0;
    for (std::size_t j = r.begin; j < r.end; ++j) {
      if (std::abs(f[j]) >= lambda) m += mu.weight(j);
    }
    best = std::max(best, lambda * m);
  }
  return best;
}

}  // namespace oracle
