#include "paravmo/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace paravmo {

namespace {

void require_compatible(const SimpleFunction& f, const Measure& mu) {
  if (f.size() != mu.leaf_count()) throw std::invalid_argument("function and measure have different leaf counts");
}

/// (|value|, weight) pairs of f on Q, sorted by decreasing magnitude.
std::vector<std::pair<double, double>> level_profile(const SimpleFunction& f, CubeId q, const Measure& mu) {
  const LeafRange r = mu.tree().leaves(q);
  std::vector<std::pair<double, double>> out;
  out.reserve(r.size());
  for (std::size_t i = r.begin; i < r.end; ++i) out.emplace_back(std::abs(f[i]), mu.weight(i));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return out;
}

}  // namespace

Complex average(const SimpleFunction& f, CubeId q, const Measure& mu) {
  require_compatible(f, mu);
  const double m = mu.mass(q);
  if (m <= 0.0) return {};
  const LeafRange r = mu.tree().leaves(q);
  Complex sum{};
  for (std::size_t i = r.begin; i < r.end; ++i) sum += f[i] * mu.weight(i);
  return sum / m;
}

std::vector<Complex> all_averages(const SimpleFunction& f, const Measure& mu) {
  require_compatible(f, mu);
  const DyadicTree& tree = mu.tree();
  std::vector<Complex> integral(tree.cube_count());
  for (std::size_t leaf = 0; leaf < f.size(); ++leaf) integral[tree.leaf_cube(leaf).value] = f[leaf] * mu.weight(leaf);
  for (std::size_t i = tree.cube_count(); i-- > 1;) {
    integral[tree.cube(CubeId{static_cast<std::uint32_t>(i)}).parent] += integral[i];
  }
  for (std::size_t i = 0; i < integral.size(); ++i) {
    const double m = mu.mass(CubeId{static_cast<std::uint32_t>(i)});
    integral[i] = m > 0.0 ? integral[i] / m : Complex{};
  }
  return integral;
}

SimpleFunction martingale_difference(const SimpleFunction& b, CubeId q, const Measure& mu) {
  require_compatible(b, mu);
  const DyadicTree& tree = mu.tree();
  if (tree.is_leaf(q)) throw std::invalid_argument("no children");
  const Complex parent_avg = average(b, q, mu);
  SimpleFunction out(b.size());
  for (CubeId child : tree.children(q)) {
    const Complex jump = average(b, child, mu) - parent_avg;
    const LeafRange r = tree.leaves(child);
    for (std::size_t i = r.begin; i < r.end; ++i) out[i] = jump;
  }
  return out;
}

double lp_norm(const SimpleFunction& f, double p, const Measure& mu, std::optional<CubeId> q) {
  require_compatible(f, mu);
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_norm: p must be a finite number >= 1");
  const LeafRange r = mu.tree().leaves(q.value_or(mu.tree().root()));
  double sum = 0.0;
  if (p == 2.0) {
    for (std::size_t i = r.begin; i < r.end; ++i) sum += std::norm(f[i]) * mu.weight(i);
    return std::sqrt(sum);
  }
  for (std::size_t i = r.begin; i < r.end; ++i) sum += std::pow(std::abs(f[i]), p) * mu.weight(i);
  return std::pow(sum, 1.0 / p);
}

double weak_l1_norm(const SimpleFunction& f, CubeId q, const Measure& mu) {
  require_compatible(f, mu);
  const auto profile = level_profile(f, q, mu);
  double best = 0.0;
  double mass_at_least = 0.0;
  for (std::size_t i = 0; i < profile.size();) {
    const double level = profile[i].first;
    while (i < profile.size() && profile[i].first == level) mass_at_least += profile[i++].second;
    best = std::max(best, level * mass_at_least);
  }
  return best;
}

double linfty_gamma_norm(const SimpleFunction& f, CubeId q, double gamma, const Measure& mu) {
  require_compatible(f, mu);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("linfty_gamma_norm: gamma must lie in [0, 1]");
  const double total = mu.mass(q);
  if (total <= 0.0) return 0.0;
  const double allowance = gamma * total + kMassTolerance * total;
  const auto profile = level_profile(f, q, mu);
  // Walking down the distinct levels, mass strictly above the current level
  // only grows; the answer is the last admissible level (or 0).
  double answer = profile.empty() ? 0.0 : profile.front().first;
  double mass_above = 0.0;
  for (std::size_t i = 0; i < profile.size();) {
    const double level = profile[i].first;
    if (mass_above > allowance) break;
    answer = level;
    while (i < profile.size() && profile[i].first == level) mass_above += profile[i++].second;
  }
  if (mass_above <= allowance) answer = 0.0;
  return answer;
}

MonotoneMap MonotoneMap::power(double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("MonotoneMap::power: exponent must be positive");
  return {[exponent](double t) { return std::pow(t, exponent); },
          [exponent](double t) { return std::pow(t, 1.0 / exponent); }};
}

bool chebyshev_bound_check(const SimpleFunction& f, CubeId q, double gamma, const MonotoneMap& phi,
                           const Measure& mu) {
  require_compatible(f, mu);
  const double total = mu.mass(q);
  if (total <= 0.0 || gamma <= 0.0) return true;
  const LeafRange r = mu.tree().leaves(q);
  double integral = 0.0;
  for (std::size_t i = r.begin; i < r.end; ++i) integral += phi.forward(std::abs(f[i])) * mu.weight(i);
  const double rhs = phi.inverse(integral / (gamma * total));
  const double lhs = linfty_gamma_norm(f, q, gamma, mu);
  return lhs <= rhs * (1.0 + 1e-12) + 1e-300;
}

Complex pairing(const SimpleFunction& f, const SimpleFunction& g, const Measure& mu) {
  require_compatible(f, mu);
  require_compatible(g, mu);
  Complex sum{};
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * std::conj(g[i]) * mu.weight(i);
  return sum;
}

}  // namespace paravmo
