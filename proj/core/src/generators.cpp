#include "paravmo/generators.hpp"

#include <cmath>
#include <stdexcept>

#include "paravmo/norms.hpp"
#include "paravmo/paraproduct.hpp"
#include "paravmo/random.hpp"
#include "paravmo/serialization.hpp"

namespace paravmo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double root_volume(const DyadicTree& tree) { return std::ldexp(1.0, -tree.coarsest_level() * tree.dimension()); }

int relative_level(const DyadicTree& tree, CubeId q) { return tree.level(q) - tree.coarsest_level(); }

Measure from_cube_masses(TreePtr tree, const std::vector<double>& masses) {
  std::vector<double> weights(tree->leaf_count());
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = masses[tree->leaf_cube(i).value];
  return {std::move(tree), std::move(weights)};
}

SimpleFunction normalized(SimpleFunction f, double p, const Measure& mu) {
  const double n = lp_norm(f, p, mu);
  if (n > 0.0) f *= 1.0 / n;
  return f;
}

Instance load_custom(const GeneratorSpec& spec) {
  if (spec.args.empty()) throw std::invalid_argument("custom-json needs a path argument");
  return load_instance(spec.args[0]);
}

}  // namespace

GeneratorSpec GeneratorSpec::parse(const std::string& text) {
  GeneratorSpec spec;
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) {
    if (t.find(')') != std::string::npos) throw std::invalid_argument("generator '" + text + "': stray ')'");
    spec.name = t;
    return spec;
  }
  if (t.back() != ')') throw std::invalid_argument("generator '" + text + "': missing ')'");
  spec.name = trim(t.substr(0, open));
  const std::string inner = t.substr(open + 1, t.size() - open - 2);
  std::size_t start = 0;
  while (start <= inner.size()) {
    const auto comma = inner.find(',', start);
    const std::string arg = trim(inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!arg.empty()) spec.args.push_back(arg);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return spec;
}

double GeneratorSpec::number(std::size_t i, double fallback) const {
  if (i >= args.size()) return fallback;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(args[i], &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != args[i].size()) {
    throw std::invalid_argument("generator '" + name + "': argument " + std::to_string(i + 1) + " is not a number");
  }
  return v;
}

std::string GeneratorSpec::to_string() const {
  if (args.empty()) return name;
  std::string s = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i];
  return s + ")";
}

SimpleFunction haar(const DyadicTree& tree, CubeId q) {
  SimpleFunction f(tree.leaf_count());
  const std::vector<CubeId> children = tree.children(q);
  for (std::size_t c = 0; c < children.size(); ++c) {
    const double sign = (c & 1U) == 0 ? 1.0 : -1.0;
    const LeafRange r = tree.leaves(children[c]);
    for (std::size_t x = r.begin; x < r.end; ++x) f[x] = sign;
  }
  return f;
}

CubeId leftmost_cube(const DyadicTree& tree, int level) { return tree.ancestor_at_level(0, level); }

SimpleFunction vmo_decay_symbol(const DyadicTree& tree, double alpha) {
  SimpleFunction b(tree.leaf_count());
  for (CubeId q : tree.non_leaf_cubes()) {
    const double c = std::exp2(-alpha * relative_level(tree, q));
    const std::vector<CubeId> children = tree.children(q);
    for (std::size_t k = 0; k < children.size(); ++k) {
      const LeafRange r = tree.leaves(children[k]);
      for (std::size_t x = r.begin; x < r.end; ++x) b[x] += (k & 1U) == 0 ? c : -c;
    }
  }
  return b;
}

SimpleFunction bmo_not_vmo_symbol(const DyadicTree& tree) {
  SimpleFunction b(tree.leaf_count());
  if (tree.is_leaf(tree.root())) return b;
  const CubeId q0 = tree.children(tree.root()).front();
  for (CubeId q : tree.non_leaf_cubes()) {
    if (tree.contains(q0, q)) b += haar(tree, q);
  }
  return b;
}

SimpleFunction haar_lacunary_symbol(const DyadicTree& tree, double rho) {
  SimpleFunction b(tree.leaf_count());
  for (int k = 0; k < tree.depth(); ++k) {
    b += std::pow(rho, k) * haar(tree, leftmost_cube(tree, tree.coarsest_level() + k));
  }
  return b;
}

SimpleFunction random_symbol(const DyadicTree& tree, std::uint64_t seed) {
  Rng rng(seed);
  SimpleFunction b(tree.leaf_count());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = rng.normal();
  return b;
}

SimpleFunction make_symbol(const GeneratorSpec& spec, const Measure& mu, std::uint64_t seed) {
  const DyadicTree& tree = mu.tree();
  if (spec.name == "haar-lacunary") return haar_lacunary_symbol(tree, spec.number(0, 0.5));
  if (spec.name == "vmo-decay") return vmo_decay_symbol(tree, spec.number(0, 0.5));
  if (spec.name == "bmo-not-vmo") return bmo_not_vmo_symbol(tree);
  if (spec.name == "random") {
    return random_symbol(tree, spec.args.empty() ? seed : static_cast<std::uint64_t>(spec.number(0, 0)));
  }
  if (spec.name == "constant") return SimpleFunction::constant(tree.leaf_count(), spec.number(0, 1.0));
  if (spec.name == "haar") {
    const int k = static_cast<int>(spec.number(0, 0));
    if (k < 0 || k >= tree.depth()) throw std::invalid_argument("haar(k): k must lie in [0, depth)");
    return haar(tree, leftmost_cube(tree, tree.coarsest_level() + k));
  }
  if (spec.name == "custom-json") {
    Instance inst = load_custom(spec);
    if (!inst.values || inst.values->size() != tree.leaf_count()) {
      throw std::invalid_argument("custom-json symbol: 'values' missing or of wrong length");
    }
    return *inst.values;
  }
  throw std::invalid_argument("unknown symbol generator '" + spec.name + "'");
}

Measure doubling_measure(TreePtr tree, double gamma_min, std::uint64_t seed) {
  const double children = static_cast<double>(tree->children_per_cube());
  if (!(gamma_min >= 0.0) || gamma_min * children > 1.0) {
    throw std::invalid_argument("doubling(gamma_min): gamma_min must lie in [0, 2^-d]");
  }
  Rng rng(seed);
  std::vector<double> masses(tree->cube_count(), 0.0);
  masses[0] = root_volume(*tree);
  for (CubeId q : tree->non_leaf_cubes()) {
    const std::vector<CubeId> kids = tree->children(q);
    std::vector<double> u(kids.size());
    double total = 0.0;
    for (double& v : u) {
      v = rng.uniform(1e-3, 1.0);
      total += v;
    }
    for (std::size_t c = 0; c < kids.size(); ++c) {
      masses[kids[c].value] = masses[q.value] * (gamma_min + (1.0 - children * gamma_min) * u[c] / total);
    }
  }
  return from_cube_masses(std::move(tree), masses);
}

Measure pointmass_measure(TreePtr tree, std::size_t k) {
  const std::size_t n = tree->leaf_count();
  if (k < 1 || k > n) throw std::invalid_argument("pointmass(k): k must lie in [1, leaf count]");
  std::vector<double> weights(n, 0.0);
  for (std::size_t j = 0; j < k; ++j) weights[j * n / k] = root_volume(*tree) / static_cast<double>(k);
  return {std::move(tree), std::move(weights)};
}

Measure cantor_measure(TreePtr tree, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("cantor(theta): theta must lie in (0, 1)");
  std::vector<double> masses(tree->cube_count(), 0.0);
  masses[0] = root_volume(*tree);
  for (CubeId q : tree->non_leaf_cubes()) {
    const std::vector<CubeId> kids = tree->children(q);
    for (std::size_t c = 0; c < kids.size(); ++c) {
      double m = masses[q.value];
      for (int j = 0; j < tree->dimension(); ++j) m *= ((c >> j) & 1U) == 0 ? theta : 1.0 - theta;
      masses[kids[c].value] = m;
    }
  }
  return from_cube_masses(std::move(tree), masses);
}

Measure make_measure(const GeneratorSpec& spec, TreePtr tree, std::uint64_t seed) {
  if (spec.name == "lebesgue") return Measure::lebesgue(std::move(tree));
  if (spec.name == "doubling") return doubling_measure(std::move(tree), spec.number(0, 0.1), seed);
  if (spec.name == "pointmass") {
    const double k = spec.number(0, 1);
    if (k < 1 || k != std::floor(k)) throw std::invalid_argument("pointmass(k): k must be a positive integer");
    return pointmass_measure(std::move(tree), static_cast<std::size_t>(k));
  }
  if (spec.name == "cantor") return cantor_measure(std::move(tree), spec.number(0, 1.0 / 3.0));
  if (spec.name == "custom-json") {
    Instance inst = load_custom(spec);
    const DyadicTree& t = inst.measure.tree();
    if (t.dimension() != tree->dimension() || t.coarsest_level() != tree->coarsest_level() ||
        t.finest_level() != tree->finest_level()) {
      throw std::invalid_argument("custom-json measure: tree shape differs from --depth/--dim");
    }
    return inst.measure;
  }
  throw std::invalid_argument("unknown measure generator '" + spec.name + "'");
}

std::vector<SimpleFunction> haar_family(const Measure& mu, double p) {
  const DyadicTree& tree = mu.tree();
  std::vector<SimpleFunction> out;
  for (int k = tree.coarsest_level(); k < tree.finest_level(); ++k) {
    SimpleFunction h = normalized(haar(tree, leftmost_cube(tree, k)), p, mu);
    if (lp_norm(h, p, mu) > 0.0) out.push_back(std::move(h));
  }
  return out;
}

std::vector<SimpleFunction> light_cube_family(const Measure& mu, double p) {
  const DyadicTree& tree = mu.tree();
  std::vector<SimpleFunction> out;
  for (int k = tree.coarsest_level(); k <= tree.finest_level(); ++k) {
    out.push_back(testing_function(leftmost_cube(tree, k), p, mu));
  }
  return out;
}

std::vector<SimpleFunction> disjoint_family(const Measure& mu, double p) {
  const DyadicTree& tree = mu.tree();
  std::vector<SimpleFunction> out;
  for (int k = tree.coarsest_level(); k < tree.finest_level(); ++k) {
    out.push_back(testing_function(tree.children(leftmost_cube(tree, k))[1], p, mu));
  }
  return out;
}

std::vector<SimpleFunction> repeated_constant_family(const Measure& mu, double p, std::size_t n) {
  const SimpleFunction f = testing_function(mu.tree().root(), p, mu);
  return std::vector<SimpleFunction>(n, f);
}

std::vector<SimpleFunction> make_family(const std::string& name, const Measure& mu, double p) {
  if (name == "haar") return haar_family(mu, p);
  if (name == "light") return light_cube_family(mu, p);
  if (name == "disjoint") return disjoint_family(mu, p);
  if (name == "constant") return repeated_constant_family(mu, p, static_cast<std::size_t>(mu.tree().depth()) + 1);
  throw std::invalid_argument("unknown family '" + name + "'");
}

}  // namespace paravmo
