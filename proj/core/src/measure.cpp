#include "paravmo/measure.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace paravmo {

Measure::Measure(TreePtr tree, std::vector<double> weights) : tree_(std::move(tree)), weights_(std::move(weights)) {
  if (!tree_) throw std::invalid_argument("measure: null tree");
  if (weights_.size() != tree_->leaf_count()) {
    throw std::invalid_argument("measure: got " + std::to_string(weights_.size()) + " weights for " +
                                std::to_string(tree_->leaf_count()) + " leaves");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      throw std::invalid_argument("measure: weight " + std::to_string(i) + " is negative or non-finite");
    }
  }
  // Preorder storage: every child has a larger id than its parent, so a
  // reverse sweep accumulates children before parents.
  mass_.assign(tree_->cube_count(), 0.0);
  for (std::size_t leaf = 0; leaf < weights_.size(); ++leaf) mass_[tree_->leaf_cube(leaf).value] = weights_[leaf];
  for (std::size_t i = tree_->cube_count(); i-- > 1;) {
    const std::uint32_t parent = tree_->cube(CubeId{static_cast<std::uint32_t>(i)}).parent;
    mass_[parent] += mass_[i];
  }
}

Measure Measure::lebesgue(TreePtr tree) {
  const double leaf_volume = std::ldexp(1.0, -tree->finest_level() * tree->dimension());
  std::vector<double> w(tree->leaf_count(), leaf_volume);
  return Measure(std::move(tree), std::move(w));
}

}  // namespace paravmo
