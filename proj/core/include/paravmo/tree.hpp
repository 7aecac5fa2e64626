#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "paravmo/dyadic_rational.hpp"

namespace paravmo {

/// Index of a cube inside a DyadicTree (depth-first preorder position).
struct CubeId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(CubeId, CubeId) = default;
};

inline constexpr std::uint32_t kNoCube = UINT32_MAX;

/// Leaf-index half-open range. Every cube covers a contiguous block of
/// leaves in canonical depth-first order.
struct LeafRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t leaf) const { return leaf >= begin && leaf < end; }
};

struct Cube {
  int level = 0;                 // D_k index; larger is finer, side = 2^-level
  std::uint32_t parent = kNoCube;
  std::uint32_t first_child = kNoCube;  // id + 1 in preorder; kNoCube for leaves
  std::uint32_t child_stride = 0;       // preorder distance between consecutive children
  LeafRange leaves;
  DyadicRational side;
  DyadicRational dist2;          // squared Euclidean distance from the origin to the closed cube
};

/// Finite truncated dyadic grid over a window of R^d.
///
/// The root is a single cube of side 2^-coarsest_level with lower corner
/// `origin`; every cube above `finest_level` splits into 2^d children.
/// Cubes are stored in depth-first preorder, so the leaves of any cube form a
/// contiguous range and the leaves themselves are numbered in canonical
/// depth-first order. Child c of a cube sits at offset bit j of c along axis j.
class DyadicTree {
 public:
  /// Throws std::invalid_argument when the shape or origin is invalid.
  DyadicTree(int dimension, int coarsest_level, int finest_level,
             std::vector<DyadicRational> origin = {});

  static std::shared_ptr<const DyadicTree> unit(int depth, int dimension = 1);

  int dimension() const { return dimension_; }
  int coarsest_level() const { return coarsest_; }
  int finest_level() const { return finest_; }
  int depth() const { return finest_ - coarsest_; }
  std::span<const DyadicRational> origin() const { return origin_; }
  std::size_t children_per_cube() const { return std::size_t{1} << dimension_; }

  std::size_t cube_count() const { return cubes_.size(); }
  std::size_t leaf_count() const { return leaf_cube_.size(); }
  CubeId root() const { return CubeId{0}; }

  const Cube& cube(CubeId id) const { return cubes_.at(id.value); }
  int level(CubeId id) const { return cube(id).level; }
  bool is_leaf(CubeId id) const { return cube(id).first_child == kNoCube; }
  LeafRange leaves(CubeId id) const { return cube(id).leaves; }
  /// Lattice coordinates: the cube is prod_j [p_j 2^-level, (p_j+1) 2^-level).
  std::span<const std::int64_t> position(CubeId id) const;
  DyadicRational corner(CubeId id, int axis) const;
  /// dist(0,Q) >= threshold, decided exactly on the squared distance.
  bool distance_at_least(CubeId id, double threshold) const;
  double distance(CubeId id) const;

  /// One past the last preorder id in the subtree of `id`.
  std::uint32_t subtree_end(CubeId id) const;

  /// Empty for leaves.
  std::vector<CubeId> children(CubeId id) const;
  /// Parent index, kNoCube for the root.
  std::uint32_t parent(CubeId id) const { return cube(id).parent; }
  CubeId leaf_cube(std::size_t leaf) const { return CubeId{leaf_cube_.at(leaf)}; }
  /// Child of `id` that contains `leaf`; `leaf` must lie in `id`, which must not be a leaf.
  CubeId child_containing(CubeId id, std::size_t leaf) const;

  /// Q subseteq R (as sets).
  bool contains(CubeId outer, CubeId inner) const;
  bool intersects(CubeId a, CubeId b) const { return contains(a, b) || contains(b, a); }

  /// All cube ids in preorder / all non-leaf ids / all cubes at one level.
  std::vector<CubeId> all_cubes() const;
  std::vector<CubeId> non_leaf_cubes() const;
  std::vector<CubeId> cubes_at_level(int level) const;

  /// Cube at `level` containing `leaf`.
  CubeId ancestor_at_level(std::size_t leaf, int level) const;

 private:
  void build(std::uint32_t parent, int level, std::vector<std::int64_t> pos);

  int dimension_;
  int coarsest_;
  int finest_;
  std::vector<DyadicRational> origin_;
  std::vector<Cube> cubes_;
  std::vector<std::int64_t> positions_;  // dimension_ entries per cube
  std::vector<std::uint32_t> leaf_cube_;
};

using TreePtr = std::shared_ptr<const DyadicTree>;

}  // namespace paravmo
