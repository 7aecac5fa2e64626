#pragma once

#include <span>
#include <vector>

#include "paravmo/tree.hpp"

namespace paravmo {

/// A measure on a finite dyadic tree given by nonnegative leaf weights.
///
/// Cube masses mu(Q) are precomputed on construction; the object is
/// immutable afterwards and cheap to share by const reference.
class Measure {
 public:
  /// Throws std::invalid_argument if the weight count does not match the
  /// tree's leaves or a weight is negative or non-finite.
  Measure(TreePtr tree, std::vector<double> weights);

  /// Lebesgue measure restricted to the tree's window: leaf weight = side^d.
  static Measure lebesgue(TreePtr tree);

  const DyadicTree& tree() const { return *tree_; }
  const TreePtr& tree_ptr() const { return tree_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t leaf) const { return weights_[leaf]; }
  double mass(CubeId q) const { return mass_.at(q.value); }
  double total_mass() const { return mass_.front(); }
  std::size_t leaf_count() const { return weights_.size(); }

 private:
  TreePtr tree_;
  std::vector<double> weights_;
  std::vector<double> mass_;
};

}  // namespace paravmo
