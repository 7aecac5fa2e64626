#include "paravmo/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "paravmo/norms.hpp"

namespace paravmo {

CubeCollection::CubeCollection(const DyadicTree& tree, std::vector<CubeId> ids)
    : ids_(std::move(ids)), member_(tree.cube_count(), false) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  for (CubeId q : ids_) {
    if (q.value >= tree.cube_count()) throw std::out_of_range("cube collection: cube id outside the tree");
    member_[q.value] = true;
  }
}

CubeCollection CubeCollection::all(const DyadicTree& tree) { return {tree, tree.all_cubes()}; }

CubeCollection CubeCollection::non_leaf(const DyadicTree& tree) { return {tree, tree.non_leaf_cubes()}; }

bool CubeCollection::is_connected(const DyadicTree& tree) const {
  // Connected iff whenever a member has a member ancestor, its parent is a
  // member as well.
  for (CubeId q : ids_) {
    const std::uint32_t parent = tree.parent(q);
    if (parent == kNoCube || contains(CubeId{parent})) continue;
    for (std::uint32_t a = tree.parent(CubeId{parent}); a != kNoCube; a = tree.parent(CubeId{a})) {
      if (contains(CubeId{a})) return false;
    }
  }
  return true;
}

CubeCollection CubeCollection::below(const DyadicTree& tree, CubeId q) const {
  return filter(tree, [&](CubeId r) { return tree.contains(q, r); });
}

CubeCollection CubeCollection::united(const DyadicTree& tree, const CubeCollection& other) const {
  std::vector<CubeId> ids(ids_);
  ids.insert(ids.end(), other.ids_.begin(), other.ids_.end());
  return {tree, std::move(ids)};
}

CubeCollection CubeCollection::minus(const DyadicTree& tree, const CubeCollection& other) const {
  return filter(tree, [&](CubeId q) { return !other.contains(q); });
}

double osc(const SimpleFunction& b, CubeId q, double p, const Measure& mu) {
  if (!(p >= 1.0)) throw std::invalid_argument("osc: p must be >= 1");
  const double m = mu.mass(q);
  if (m <= 0.0) return 0.0;
  const Complex avg = average(b, q, mu);
  const LeafRange r = mu.tree().leaves(q);
  double sum = 0.0;
  for (std::size_t i = r.begin; i < r.end; ++i) sum += std::pow(std::abs(b[i] - avg), p) * mu.weight(i);
  return std::pow(sum / m, 1.0 / p);
}

std::vector<double> all_oscillations(const SimpleFunction& b, double p, const Measure& mu) {
  if (!(p >= 1.0)) throw std::invalid_argument("osc: p must be >= 1");
  const DyadicTree& tree = mu.tree();
  const std::vector<Complex> avg = all_averages(b, mu);
  std::vector<double> out(tree.cube_count(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const CubeId q{static_cast<std::uint32_t>(i)};
    const double m = mu.mass(q);
    if (m <= 0.0 || tree.is_leaf(q)) continue;
    const LeafRange r = tree.leaves(q);
    double sum = 0.0;
    for (std::size_t l = r.begin; l < r.end; ++l) sum += std::pow(std::abs(b[l] - avg[i]), p) * mu.weight(l);
    out[i] = std::pow(sum / m, 1.0 / p);
  }
  return out;
}

double bmo_norm(const SimpleFunction& b, const CubeCollection& collection, double p, const Measure& mu) {
  double best = 0.0;
  for (CubeId q : collection) best = std::max(best, osc(b, q, p, mu));
  return best;
}

std::vector<double> default_thresholds() {
  std::vector<double> m;
  for (int k = 1; k <= 8; ++k) m.push_back(std::ldexp(1.0, k));
  return m;
}

VmoModuli vmo_moduli(const SimpleFunction& b, const Measure& mu, double p, std::span<const double> thresholds) {
  return vmo_moduli(b, mu, p, thresholds, CubeCollection::all(mu.tree()));
}

VmoModuli vmo_moduli(const SimpleFunction& b, const Measure& mu, double p, std::span<const double> thresholds,
                     const CubeCollection& collection) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0)) throw std::invalid_argument("vmo_moduli: thresholds must be positive");
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      throw std::invalid_argument("vmo_moduli: thresholds must be strictly increasing");
    }
  }
  const DyadicTree& tree = mu.tree();
  const std::vector<double> o = all_oscillations(b, p, mu);
  VmoModuli out;
  out.p = p;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  for (double M : thresholds) {
    double heavy = 0.0;
    double light = 0.0;
    double distant = 0.0;
    for (CubeId q : collection) {
      const double m = mu.mass(q);
      const double v = o[q.value];
      if (m >= M) heavy = std::max(heavy, v);
      if (m <= 1.0 / M) light = std::max(light, v);
      if (tree.distance_at_least(q, M)) distant = std::max(distant, v);
    }
    out.heavy.push_back(heavy);
    out.light.push_back(light);
    out.distant.push_back(distant);
  }
  return out;
}

void write_moduli_csv(std::ostream& out, const VmoModuli& moduli) {
  const auto old_precision = out.precision(17);
  out << "M,heavy,light,distant\n";
  for (std::size_t i = 0; i < moduli.thresholds.size(); ++i) {
    out << moduli.thresholds[i] << ',' << moduli.heavy[i] << ',' << moduli.light[i] << ',' << moduli.distant[i]
        << '\n';
  }
  out.precision(old_precision);
}

double doubling_constant(const Measure& mu, const CubeCollection& collection) {
  const DyadicTree& tree = mu.tree();
  double best = std::ldexp(1.0, -tree.dimension());
  for (CubeId q : collection) {
    if (tree.is_leaf(q)) throw std::invalid_argument("doubling_constant: leaf cube in collection");
    const double m = mu.mass(q);
    if (m <= 0.0) throw std::domain_error("undefined ratio");
    for (CubeId c : tree.children(q)) best = std::min(best, mu.mass(c) / m);
  }
  return best;
}

CubeCollection default_anchors(const DyadicTree& tree, double radius) {
  const long double r2 = static_cast<long double>(radius) * radius;
  auto inside = [&](CubeId q) {
    DyadicRational far2;
    for (int j = 0; j < tree.dimension(); ++j) {
      const DyadicRational lo = tree.corner(q, j);
      const DyadicRational hi = lo + tree.cube(q).side;
      const DyadicRational far = std::max(lo.abs(), hi.abs());
      far2 = far2 + far * far;
    }
    return far2.to_long_double() <= r2;
  };
  std::vector<CubeId> anchors;
  // Preorder walk that stops descending once a cube is accepted.
  std::vector<CubeId> stack{tree.root()};
  while (!stack.empty()) {
    const CubeId q = stack.back();
    stack.pop_back();
    if (inside(q)) {
      anchors.push_back(q);
      continue;
    }
    for (CubeId c : tree.children(q)) stack.push_back(c);
  }
  return {tree, std::move(anchors)};
}

ReductionPartition partition_reduction(const CubeCollection& collection, const Measure& mu,
                                       const CubeCollection& anchors) {
  const DyadicTree& tree = mu.tree();
  std::vector<CubeId> distant;
  std::vector<CubeId> inner;
  std::vector<CubeId> outer;
  for (CubeId q : collection) {
    bool meets = false;
    bool inside_anchor = false;
    for (CubeId a : anchors) {
      if (!tree.intersects(q, a)) continue;
      meets = true;
      if (tree.contains(a, q)) {
        inside_anchor = true;
        break;
      }
    }
    if (!meets) {
      distant.push_back(q);
    } else if (inside_anchor) {
      inner.push_back(q);
    } else {
      outer.push_back(q);
    }
  }

  ReductionPartition out;
  out.distant = CubeCollection(tree, std::move(distant));
  out.inner = CubeCollection(tree, std::move(inner));
  out.outer = CubeCollection(tree, outer);

  // Minimal outer cubes are pairwise disjoint; each outer cube is assigned
  // to the first minimal cube (in preorder) that it contains.
  std::vector<CubeId> minimal;
  for (CubeId q : outer) {
    const bool has_outer_below = std::any_of(outer.begin(), outer.end(), [&](CubeId r) {
      return r != q && tree.contains(q, r);
    });
    if (!has_outer_below) minimal.push_back(q);
  }
  std::vector<std::vector<CubeId>> chains(minimal.size());
  for (CubeId q : outer) {
    for (std::size_t i = 0; i < minimal.size(); ++i) {
      if (tree.contains(q, minimal[i])) {
        chains[i].push_back(q);
        break;
      }
    }
  }
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    out.outer_chains.emplace_back(minimal[i], CubeCollection(tree, std::move(chains[i])));
  }
  return out;
}

ReductionPartition partition_reduction(const CubeCollection& collection, const Measure& mu, double M) {
  return partition_reduction(collection, mu, default_anchors(mu.tree(), M));
}

MeasurePartition partition_by_measure(const CubeCollection& collection, const Measure& mu, double M) {
  if (!(M >= 1.0)) throw std::invalid_argument("partition_by_measure: M must be >= 1");
  const DyadicTree& tree = mu.tree();
  const double lo = std::isinf(M) ? 0.0 : 1.0 / M;
  MeasurePartition out;
  out.bounded = collection.filter(tree, [&](CubeId q) {
    const double m = mu.mass(q);
    return m >= lo && m <= M;
  });
  out.rest = collection.minus(tree, out.bounded);
  return out;
}

}  // namespace paravmo
