#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paravmo/measure.hpp"
#include "paravmo/simple_function.hpp"

namespace paravmo {

/// "name(arg, ...)" split into its parts; a bare name has no arguments.
struct GeneratorSpec {
  std::string name;
  std::vector<std::string> args;

  /// Throws std::invalid_argument on unbalanced parentheses.
  static GeneratorSpec parse(const std::string& text);
  /// Numeric argument i, or `fallback` when absent.
  double number(std::size_t i, double fallback) const;
  std::string to_string() const;
};

/// +1 on the children of Q whose first-axis bit is 0, -1 on the others.
SimpleFunction haar(const DyadicTree& tree, CubeId q);

/// Cube at `level` containing the first leaf.
CubeId leftmost_cube(const DyadicTree& tree, int level);

// Symbols. Levels below are counted from the coarsest level.

/// sum over non-leaf Q of 2^(-alpha level(Q)) h_Q.
SimpleFunction vmo_decay_symbol(const DyadicTree& tree, double alpha);
/// sum of h_Q over all non-leaf Q inside the first child of the root.
SimpleFunction bmo_not_vmo_symbol(const DyadicTree& tree);
/// sum over k of rho^k h at the leftmost level-k cube.
SimpleFunction haar_lacunary_symbol(const DyadicTree& tree, double rho);
/// Independent standard normal leaf values.
SimpleFunction random_symbol(const DyadicTree& tree, std::uint64_t seed);

/// Symbol from a generator string: haar-lacunary(rho) | vmo-decay(alpha) | bmo-not-vmo |
/// random[(seed)] | constant(c) | haar(k) | custom-json(path).
/// `seed` is used by random when the string carries none.
SimpleFunction make_symbol(const GeneratorSpec& spec, const Measure& mu, std::uint64_t seed);

// Measures. The root carries its Lebesgue volume.

/// Child ratios drawn uniformly subject to every ratio >= gamma_min.
Measure doubling_measure(TreePtr tree, double gamma_min, std::uint64_t seed);
/// Equal masses on k leaves spread evenly; zero elsewhere.
Measure pointmass_measure(TreePtr tree, std::size_t k);
/// Each bisection along each axis gives theta to the lower half.
Measure cantor_measure(TreePtr tree, double theta);

/// Measure from a generator string: lebesgue | doubling(gamma_min) | pointmass(k) |
/// cantor(theta) | custom-json(path).
Measure make_measure(const GeneratorSpec& spec, TreePtr tree, std::uint64_t seed);

// Test-function families, normalized in L^p(mu) where mu is positive.

/// h_Q / ||h_Q||_p along the leftmost cube of each non-leaf level.
std::vector<SimpleFunction> haar_family(const Measure& mu, double p);
/// Testing functions of the leftmost cube at each level.
std::vector<SimpleFunction> light_cube_family(const Measure& mu, double p);
/// Testing functions of the second child of the leftmost cube at each non-leaf level.
std::vector<SimpleFunction> disjoint_family(const Measure& mu, double p);
/// The normalized constant function, n times.
std::vector<SimpleFunction> repeated_constant_family(const Measure& mu, double p, std::size_t n);

/// haar | light | disjoint | constant.
std::vector<SimpleFunction> make_family(const std::string& name, const Measure& mu, double p);

}  // namespace paravmo
