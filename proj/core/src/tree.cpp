#include "paravmo/tree.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace paravmo {

namespace {

constexpr std::size_t kMaxLeaves = std::size_t{1} << 24;

DyadicRational closed_interval_distance(const DyadicRational& lo, const DyadicRational& hi) {
  if (lo.sign() > 0) return lo;
  if (hi.sign() < 0) return hi.abs();
  return {};
}

}  // namespace

DyadicTree::DyadicTree(int dimension, int coarsest_level, int finest_level,
                       std::vector<DyadicRational> origin)
    : dimension_(dimension), coarsest_(coarsest_level), finest_(finest_level), origin_(std::move(origin)) {
  if (dimension_ < 1 || dimension_ > 8) throw std::invalid_argument("tree: dimension must be in [1, 8]");
  if (finest_ < coarsest_) throw std::invalid_argument("tree: finest level must be >= coarsest level");
  const auto depth = static_cast<std::size_t>(finest_ - coarsest_);
  if (depth * static_cast<std::size_t>(dimension_) > 24) {
    throw std::invalid_argument("tree: more than 2^24 leaves requested");
  }
  if (origin_.empty()) origin_.assign(static_cast<std::size_t>(dimension_), DyadicRational{});
  if (origin_.size() != static_cast<std::size_t>(dimension_)) {
    throw std::invalid_argument("tree: origin has " + std::to_string(origin_.size()) +
                                " coordinates, expected " + std::to_string(dimension_));
  }

  // The root must be a genuine dyadic cube: origin is a multiple of its side.
  std::vector<std::int64_t> root_pos(static_cast<std::size_t>(dimension_));
  for (int j = 0; j < dimension_; ++j) {
    const DyadicRational& o = origin_[static_cast<std::size_t>(j)];
    // o = m 2^e must be an integer multiple of 2^-coarsest.
    if (!o.is_zero() && o.exponent() < -coarsest_) {
      throw std::invalid_argument("tree: origin coordinate " + o.to_string() +
                                  " is not aligned to the root side length");
    }
    const int shift = o.exponent() + coarsest_;
    root_pos[static_cast<std::size_t>(j)] = o.is_zero() ? 0 : o.mantissa() * (std::int64_t{1} << shift);
  }

  const std::size_t leaves = std::size_t{1} << (depth * static_cast<std::size_t>(dimension_));
  if (leaves > kMaxLeaves) throw std::invalid_argument("tree: too many leaves");
  cubes_.reserve(leaves * 2);
  positions_.reserve(leaves * 2 * static_cast<std::size_t>(dimension_));
  leaf_cube_.reserve(leaves);
  build(kNoCube, coarsest_, std::move(root_pos));
}

std::shared_ptr<const DyadicTree> DyadicTree::unit(int depth, int dimension) {
  return std::make_shared<const DyadicTree>(dimension, 0, depth);
}

void DyadicTree::build(std::uint32_t parent, int level, std::vector<std::int64_t> pos) {
  const auto id = static_cast<std::uint32_t>(cubes_.size());
  Cube c;
  c.level = level;
  c.parent = parent;
  c.side = DyadicRational::pow2(-level);
  c.leaves.begin = leaf_cube_.size();
  DyadicRational d2;
  for (int j = 0; j < dimension_; ++j) {
    const DyadicRational lo(pos[static_cast<std::size_t>(j)], -level);
    const DyadicRational hi(pos[static_cast<std::size_t>(j)] + 1, -level);
    const DyadicRational dj = closed_interval_distance(lo, hi);
    d2 = d2 + dj * dj;
  }
  c.dist2 = d2;
  cubes_.push_back(c);
  positions_.insert(positions_.end(), pos.begin(), pos.end());

  if (level == finest_) {
    leaf_cube_.push_back(id);
  } else {
    const std::size_t k = children_per_cube();
    for (std::size_t child = 0; child < k; ++child) {
      std::vector<std::int64_t> cpos(pos.size());
      for (int j = 0; j < dimension_; ++j) {
        cpos[static_cast<std::size_t>(j)] = 2 * pos[static_cast<std::size_t>(j)] + static_cast<std::int64_t>((child >> j) & 1U);
      }
      const auto before = static_cast<std::uint32_t>(cubes_.size());
      build(id, level + 1, std::move(cpos));
      if (child == 0) {
        cubes_[id].first_child = before;
        cubes_[id].child_stride = static_cast<std::uint32_t>(cubes_.size()) - before;
      }
    }
  }
  cubes_[id].leaves.end = leaf_cube_.size();
}

std::span<const std::int64_t> DyadicTree::position(CubeId id) const {
  const auto d = static_cast<std::size_t>(dimension_);
  return std::span<const std::int64_t>(positions_).subspan(static_cast<std::size_t>(id.value) * d, d);
}

DyadicRational DyadicTree::corner(CubeId id, int axis) const {
  return {position(id)[static_cast<std::size_t>(axis)], -level(id)};
}

bool DyadicTree::distance_at_least(CubeId id, double threshold) const {
  if (threshold <= 0.0) return true;
  const long double t = threshold;
  return cube(id).dist2.to_long_double() >= t * t;
}

double DyadicTree::distance(CubeId id) const {
  return std::sqrt(static_cast<double>(cube(id).dist2.to_long_double()));
}

std::uint32_t DyadicTree::subtree_end(CubeId id) const {
  const Cube& c = cube(id);
  if (c.first_child == kNoCube) return id.value + 1;
  return c.first_child + static_cast<std::uint32_t>(children_per_cube()) * c.child_stride;
}

std::vector<CubeId> DyadicTree::children(CubeId id) const {
  const Cube& c = cube(id);
  std::vector<CubeId> out;
  if (c.first_child == kNoCube) return out;
  out.reserve(children_per_cube());
  for (std::size_t i = 0; i < children_per_cube(); ++i) {
    out.push_back(CubeId{c.first_child + static_cast<std::uint32_t>(i) * c.child_stride});
  }
  return out;
}

CubeId DyadicTree::child_containing(CubeId id, std::size_t leaf) const {
  const Cube& c = cube(id);
  if (c.first_child == kNoCube) throw std::invalid_argument("tree: leaf cube has no children");
  const std::size_t per_child = c.leaves.size() / children_per_cube();
  const std::size_t i = (leaf - c.leaves.begin) / per_child;
  return CubeId{c.first_child + static_cast<std::uint32_t>(i) * c.child_stride};
}

bool DyadicTree::contains(CubeId outer, CubeId inner) const {
  const LeafRange a = leaves(outer);
  const LeafRange b = leaves(inner);
  return a.begin <= b.begin && b.end <= a.end && level(outer) <= level(inner);
}

std::vector<CubeId> DyadicTree::all_cubes() const {
  std::vector<CubeId> out(cubes_.size());
  for (std::size_t i = 0; i < cubes_.size(); ++i) out[i] = CubeId{static_cast<std::uint32_t>(i)};
  return out;
}

std::vector<CubeId> DyadicTree::non_leaf_cubes() const {
  std::vector<CubeId> out;
  for (std::size_t i = 0; i < cubes_.size(); ++i) {
    if (cubes_[i].first_child != kNoCube) out.push_back(CubeId{static_cast<std::uint32_t>(i)});
  }
  return out;
}

std::vector<CubeId> DyadicTree::cubes_at_level(int lvl) const {
  std::vector<CubeId> out;
  for (std::size_t i = 0; i < cubes_.size(); ++i) {
    if (cubes_[i].level == lvl) out.push_back(CubeId{static_cast<std::uint32_t>(i)});
  }
  return out;
}

CubeId DyadicTree::ancestor_at_level(std::size_t leaf, int lvl) const {
  if (lvl < coarsest_ || lvl > finest_) throw std::invalid_argument("tree: level out of range");
  std::uint32_t id = leaf_cube_.at(leaf);
  while (cubes_[id].level > lvl) id = cubes_[id].parent;
  return CubeId{id};
}

}  // namespace paravmo
