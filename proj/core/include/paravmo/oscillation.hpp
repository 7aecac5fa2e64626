#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "paravmo/measure.hpp"
#include "paravmo/simple_function.hpp"

namespace paravmo {

/// Arbitrary subset of the cubes of one tree, kept sorted in preorder.
class CubeCollection {
 public:
  CubeCollection() = default;
  CubeCollection(const DyadicTree& tree, std::vector<CubeId> ids);

  static CubeCollection all(const DyadicTree& tree);
  static CubeCollection non_leaf(const DyadicTree& tree);

  std::span<const CubeId> ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(CubeId q) const { return q.value < member_.size() && member_[q.value]; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  /// For Q subseteq S subseteq R with Q, R in the collection, S is in it too.
  bool is_connected(const DyadicTree& tree) const;
  /// Members R with R subseteq Q.
  CubeCollection below(const DyadicTree& tree, CubeId q) const;
  /// Members for which `keep` holds.
  template <class Pred>
  CubeCollection filter(const DyadicTree& tree, Pred keep) const {
    std::vector<CubeId> out;
    for (CubeId q : ids_) {
      if (keep(q)) out.push_back(q);
    }
    return CubeCollection(tree, std::move(out));
  }

  CubeCollection united(const DyadicTree& tree, const CubeCollection& other) const;
  CubeCollection minus(const DyadicTree& tree, const CubeCollection& other) const;

  friend bool operator==(const CubeCollection& a, const CubeCollection& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<CubeId> ids_;
  std::vector<bool> member_;
};

/// Normalized p-oscillation (avg_Q |b - <b>_Q|^p)^(1/p); zero when mu(Q) = 0.
double osc(const SimpleFunction& b, CubeId q, double p, const Measure& mu);

/// osc over every cube, indexed by CubeId::value.
std::vector<double> all_oscillations(const SimpleFunction& b, double p, const Measure& mu);

/// Supremum of osc over the collection; 0 when empty.
double bmo_norm(const SimpleFunction& b, const CubeCollection& collection, double p, const Measure& mu);

struct VmoModuli {
  double p = 2.0;
  std::vector<double> thresholds;
  std::vector<double> heavy;    // sup osc over mu(Q) >= M
  std::vector<double> light;    // sup osc over mu(Q) <= 1/M
  std::vector<double> distant;  // sup osc over dist(0,Q) >= M
};

/// Default threshold grid 2^1 .. 2^8.
std::vector<double> default_thresholds();

/// Heavy/light/distant moduli over all cubes of the tree (or the given
/// collection). Thresholds must be positive and strictly increasing.
VmoModuli vmo_moduli(const SimpleFunction& b, const Measure& mu, double p, std::span<const double> thresholds);
VmoModuli vmo_moduli(const SimpleFunction& b, const Measure& mu, double p, std::span<const double> thresholds,
                     const CubeCollection& collection);

void write_moduli_csv(std::ostream& out, const VmoModuli& moduli);

/// inf over Q in the collection and children Q' of mu(Q')/mu(Q).
/// Throws std::domain_error("undefined ratio") when some mu(Q) = 0 and
/// std::invalid_argument for a leaf in the collection.
double doubling_constant(const Measure& mu, const CubeCollection& collection);

/// Pieces of the split of a collection against a finite anchor family.
struct ReductionPartition {
  CubeCollection distant;  // cubes disjoint from every anchor
  CubeCollection inner;    // cubes meeting the anchors and inside some anchor
  CubeCollection outer;    // the rest: cubes strictly containing every anchor they meet
  /// Outer cubes split into chains, keyed by the minimal outer cubes.
  /// A cube containing several minimal cubes goes to the first in preorder.
  std::vector<std::pair<CubeId, CubeCollection>> outer_chains;
};

/// Maximal tree cubes whose closure lies in the closed ball B(0, radius).
CubeCollection default_anchors(const DyadicTree& tree, double radius);

ReductionPartition partition_reduction(const CubeCollection& collection, const Measure& mu,
                                       const CubeCollection& anchors);
/// Uses default_anchors(tree, M).
ReductionPartition partition_reduction(const CubeCollection& collection, const Measure& mu, double M);

struct MeasurePartition {
  CubeCollection bounded;  // 1/M <= mu(Q) <= M
  CubeCollection rest;
};

/// Throws std::invalid_argument for M < 1. M = +inf keeps everything.
MeasurePartition partition_by_measure(const CubeCollection& collection, const Measure& mu, double M);

}  // namespace paravmo
