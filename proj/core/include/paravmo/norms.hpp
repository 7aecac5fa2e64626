#pragma once

#include <functional>
#include <optional>

#include "paravmo/measure.hpp"
#include "paravmo/simple_function.hpp"

namespace paravmo {

/// Relative slack used when comparing masses that the theory compares
/// exactly (level-set masses against gamma * mu(Q)).
inline constexpr double kMassTolerance = 1e-12;

/// <f>_Q; zero when mu(Q) = 0.
Complex average(const SimpleFunction& f, CubeId q, const Measure& mu);

/// Averages of f over every cube of the tree, indexed by CubeId::value.
std::vector<Complex> all_averages(const SimpleFunction& f, const Measure& mu);

/// D_Q b = sum over children P of (<b>_P - <b>_Q) 1_P.
/// Throws std::invalid_argument("no children") for a leaf cube.
SimpleFunction martingale_difference(const SimpleFunction& b, CubeId q, const Measure& mu);

/// (sum over leaves of Q of |f|^p w)^(1/p); Q defaults to the root.
/// Throws std::invalid_argument for p < 1.
double lp_norm(const SimpleFunction& f, double p, const Measure& mu, std::optional<CubeId> q = std::nullopt);

/// Unnormalized weak-L1 quasinorm on Q: max over attained levels lambda of
/// lambda * mu(Q and |f| >= lambda).
double weak_l1_norm(const SimpleFunction& f, CubeId q, const Measure& mu);

/// L^inf_gamma(Q): smallest B in {0} and the values |f| on Q with
/// mu(Q and |f| > B) <= gamma mu(Q). Zero when mu(Q) = 0.
double linfty_gamma_norm(const SimpleFunction& f, CubeId q, double gamma, const Measure& mu);

/// mu-essential supremum of |f| on Q.
inline double essential_sup(const SimpleFunction& f, CubeId q, const Measure& mu) {
  return linfty_gamma_norm(f, q, 0.0, mu);
}

/// Increasing bijection of [0, inf) with phi(0) = 0, given with its inverse.
struct MonotoneMap {
  std::function<double(double)> forward;
  std::function<double(double)> inverse;

  static MonotoneMap power(double exponent);
};

/// L^inf_gamma(Q) <= phi^-1( (1/gamma) avg_Q phi(|f|) ), up to rounding.
bool chebyshev_bound_check(const SimpleFunction& f, CubeId q, double gamma, const MonotoneMap& phi,
                           const Measure& mu);

/// <f, g> = sum f conj(g) w over all leaves.
Complex pairing(const SimpleFunction& f, const SimpleFunction& g, const Measure& mu);

}  // namespace paravmo
