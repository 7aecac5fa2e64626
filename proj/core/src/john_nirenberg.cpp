#include "paravmo/john_nirenberg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

#include "paravmo/norms.hpp"
#include "paravmo/paraproduct.hpp"
#include "paravmo/random.hpp"

namespace paravmo {

namespace {

constexpr double kSlack = 1e-12;

bool constant_on(const SimpleFunction& f, LeafRange r) {
  for (std::size_t x = r.begin + 1; x < r.end; ++x) {
    if (f[x] != f[r.begin]) return false;
  }
  return true;
}

double ratio_or_one(double num, double den, bool& unbounded) {
  if (den > 0.0) return num / den;
  if (num > 0.0) unbounded = true;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

}  // namespace

MartingaleFamily::MartingaleFamily(const Measure& mu, CubeCollection collection, std::vector<SimpleFunction> lambdas)
    : measure_(std::make_shared<const Measure>(mu)),
      collection_(std::move(collection)),
      lambdas_(std::move(lambdas)) {
  const DyadicTree& tree = mu.tree();
  const std::size_t n = collection_.size();
  if (lambdas_.size() != n) throw std::invalid_argument("martingale family: one function per cube required");
  index_.assign(tree.cube_count(), npos);
  for (std::size_t i = 0; i < n; ++i) index_[cube(i).value] = i;

  parent_.assign(n, npos);
  children_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t a = tree.parent(cube(i)); a != kNoCube; a = tree.parent(CubeId{a})) {
      if (index_[a] != npos) {
        parent_[i] = index_[a];
        children_[index_[a]].push_back(i);
        break;
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const SimpleFunction& f = lambdas_[i];
    if (f.size() != mu.leaf_count()) throw std::invalid_argument("martingale family: leaf count mismatch");
    const LeafRange r = tree.leaves(cube(i));
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (!r.contains(x) && f[x] != Complex{}) {
        throw std::invalid_argument("martingale family: lambda_Q not supported on Q");
      }
    }
    for (std::size_t c : children_[i]) {
      if (!constant_on(f, tree.leaves(cube(c)))) {
        throw std::invalid_argument("martingale family: lambda_Q not constant on a member child");
      }
    }
  }

  // Descendants follow their ancestors in preorder.
  cumulative_ = lambdas_;
  for (std::size_t i = n; i-- > 0;) {
    if (parent_[i] == npos) continue;
    const LeafRange r = tree.leaves(cube(i));
    SimpleFunction& up = cumulative_[parent_[i]];
    for (std::size_t x = r.begin; x < r.end; ++x) up[x] += cumulative_[i][x];
  }
}

MartingaleFamily MartingaleFamily::zero(const Measure& mu, CubeCollection collection) {
  std::vector<SimpleFunction> lambdas(collection.size(), SimpleFunction(mu.leaf_count()));
  return {mu, std::move(collection), std::move(lambdas)};
}

MartingaleFamily MartingaleFamily::from_symbol(const SimpleFunction& b, const Measure& mu, CubeCollection collection) {
  std::vector<SimpleFunction> lambdas;
  lambdas.reserve(collection.size());
  for (CubeId q : collection) lambdas.push_back(martingale_difference(b, q, mu));
  return {mu, std::move(collection), std::move(lambdas)};
}

MartingaleFamily MartingaleFamily::random(const Measure& mu, CubeCollection collection, std::uint64_t seed,
                                          double scale, double log_spread) {
  const DyadicTree& tree = mu.tree();
  Rng rng(seed);
  std::vector<SimpleFunction> lambdas;
  lambdas.reserve(collection.size());
  for (CubeId q : collection) {
    SimpleFunction f(mu.leaf_count());
    const double amplitude = scale * std::exp(log_spread * rng.normal());
    for (CubeId c : tree.children(q)) {
      const double v = amplitude * rng.normal();
      const LeafRange r = tree.leaves(c);
      for (std::size_t x = r.begin; x < r.end; ++x) f[x] = v;
    }
    lambdas.push_back(std::move(f));
  }
  return {mu, std::move(collection), std::move(lambdas)};
}

MartingaleFamily MartingaleFamily::lacunary(const Measure& mu, CubeCollection collection, double scale) {
  const DyadicTree& tree = mu.tree();
  std::vector<SimpleFunction> lambdas;
  lambdas.reserve(collection.size());
  for (CubeId q : collection) {
    SimpleFunction f(mu.leaf_count());
    if (!tree.is_leaf(q) && tree.leaves(q).begin == 0) {
      const LeafRange r = tree.leaves(tree.children(q).front());
      for (std::size_t x = r.begin; x < r.end; ++x) f[x] = scale;
    }
    lambdas.push_back(std::move(f));
  }
  return {mu, std::move(collection), std::move(lambdas)};
}

std::size_t MartingaleFamily::index_of(CubeId q) const {
  if (q.value >= index_.size() || index_[q.value] == npos) throw std::out_of_range("martingale family: not a member");
  return index_[q.value];
}

bool MartingaleFamily::constant_on_dyadic_children() const {
  const DyadicTree& tree = measure_->tree();
  for (std::size_t i = 0; i < size(); ++i) {
    for (CubeId c : tree.children(cube(i))) {
      if (!constant_on(lambdas_[i], tree.leaves(c))) return false;
    }
  }
  return true;
}

double b_gamma_constant(const MartingaleFamily& family, CubeId q, double gamma) {
  const Measure& mu = family.measure();
  if (family.collection().contains(q)) {
    return linfty_gamma_norm(family.cumulative(family.index_of(q)), q, gamma, mu);
  }
  SimpleFunction sum(mu.leaf_count());
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (mu.tree().contains(q, family.cube(i))) sum += family.lambda(i);
  }
  return linfty_gamma_norm(sum, q, gamma, mu);
}

StoppingForest build_stopping_forest(const MartingaleFamily& family, CubeId root, double gamma) {
  const Measure& mu = family.measure();
  const DyadicTree& tree = mu.tree();
  const std::size_t root_index = family.index_of(root);

  StoppingForest forest;
  forest.root = root;
  forest.gamma = gamma;
  forest.generation.assign(mu.leaf_count(), 0);

  std::vector<std::size_t> below{root_index};
  for (std::size_t k = 0; k < below.size(); ++k) {
    const std::size_t i = below[k];
    forest.B = std::max(forest.B, linfty_gamma_norm(family.cumulative(i), family.cube(i), gamma, mu));
    forest.C = std::max(forest.C, essential_sup(family.lambda(i), family.cube(i), mu));
    for (std::size_t c : family.member_children(i)) below.push_back(c);
  }

  const double threshold = 2.0 * forest.B * (1.0 + kSlack);
  forest.nodes.push_back(ForestNode{root, 0, MartingaleFamily::npos, {}, 0.0, 0.0});
  for (std::size_t n = 0; n < forest.nodes.size(); ++n) {
    const CubeId f = forest.nodes[n].cube;
    const std::size_t fi = family.index_of(f);
    forest.nodes[n].b_local = linfty_gamma_norm(family.cumulative(fi), f, gamma, mu);

    // (member, sum of lambda_Q over members strictly above it up to F).
    std::vector<std::pair<std::size_t, Complex>> stack;
    for (std::size_t c : family.member_children(fi)) {
      stack.emplace_back(c, family.lambda(fi)[tree.leaves(family.cube(c)).begin]);
    }
    while (!stack.empty()) {
      const auto [c, above] = stack.back();
      stack.pop_back();
      const CubeId q = family.cube(c);
      if (std::abs(above) > threshold) {
        ForestNode child{q, forest.nodes[n].generation + 1, n, {}, 0.0, 0.0};
        forest.nodes[n].children.push_back(forest.nodes.size());
        forest.nodes[n].children_mass += mu.mass(q);
        forest.nodes.push_back(std::move(child));
        continue;
      }
      for (std::size_t cc : family.member_children(c)) {
        stack.emplace_back(cc, above + family.lambda(c)[tree.leaves(family.cube(cc)).begin]);
      }
    }
  }

  // Nodes are created generation by generation, so later writes are deeper.
  for (const ForestNode& node : forest.nodes) {
    const LeafRange r = tree.leaves(node.cube);
    for (std::size_t x = r.begin; x < r.end; ++x) forest.generation[x] = node.generation;
    forest.max_generation = std::max(forest.max_generation, node.generation);
  }
  return forest;
}

JnReport verify_jn_bounds(const StoppingForest& forest, const MartingaleFamily& family) {
  const Measure& mu = family.measure();
  const DyadicTree& tree = mu.tree();
  JnReport report;

  for (const ForestNode& node : forest.nodes) {
    const double m = mu.mass(node.cube);
    if (node.children_mass > 0.5 * m * (1.0 + kSlack)) report.ok_half = false;
    if (m > 0.0) report.worst_half = std::max(report.worst_half, node.children_mass / m);
  }

  const SimpleFunction& sum = family.cumulative(family.index_of(forest.root));
  const LeafRange r = tree.leaves(forest.root);
  const double base = 2.0 * forest.B + forest.C;
  for (std::size_t x = r.begin; x < r.end; ++x) {
    if (mu.weight(x) <= 0.0) continue;
    const double bound = base * (1.0 + forest.generation[x]);
    const double value = std::abs(sum[x]);
    if (value > bound * (1.0 + kSlack)) report.ok_pointwise = false;
    if (bound > 0.0) report.worst_pointwise = std::max(report.worst_pointwise, value / bound);
  }

  const double total = mu.mass(forest.root);
  for (int k = 0; k <= forest.max_generation + 1; ++k) {
    TailRow row;
    row.k = k;
    for (std::size_t x = r.begin; x < r.end; ++x) {
      if (forest.generation[x] >= k) row.mass += mu.weight(x);
    }
    row.bound = std::ldexp(total, -k);
    row.ok = row.mass <= row.bound * (1.0 + kSlack);
    if (!row.ok) report.ok_tail = false;
    report.tail.push_back(row);
  }
  return report;
}

Jn2Report jn2_doubling_bound(const MartingaleFamily& family) {
  const Measure& mu = family.measure();
  Jn2Report report;
  try {
    report.gamma_mu = family.size() == 0 ? 1.0 : doubling_constant(mu, family.collection());
  } catch (const std::domain_error&) {
    throw std::domain_error("not doubling");
  }
  if (!(report.gamma_mu > 0.0)) throw std::domain_error("not doubling");
  if (!family.constant_on_dyadic_children()) {
    throw std::invalid_argument("jn2_doubling_bound: lambda_Q must be constant on tree children");
  }

  const std::size_t n = family.size();
  std::vector<double> sup_below(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    sup_below[i] = std::max(sup_below[i],
                            linfty_gamma_norm(family.cumulative(i), family.cube(i), report.gamma_mu / 2.0, mu));
    const std::size_t parent = family.member_parent(i);
    if (parent != MartingaleFamily::npos) sup_below[parent] = std::max(sup_below[parent], sup_below[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Jn2Row row{family.cube(i), essential_sup(family.lambda(i), family.cube(i), mu), 2.0 * sup_below[i]};
    if (row.lhs > row.rhs * (1.0 + kSlack)) report.ok = false;
    report.rows.push_back(row);
  }
  return report;
}

Jn3Report jn3_comparability(const MartingaleFamily& family, double p) {
  const Measure& mu = family.measure();
  Jn3Report report;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const CubeId q = family.cube(i);
    const double m = mu.mass(q);
    if (m <= 0.0) continue;
    report.lp_side = std::max(report.lp_side, lp_norm(family.cumulative(i), p, mu, q) / std::pow(m, 1.0 / p));
    report.weak_side = std::max(report.weak_side, weak_l1_norm(family.cumulative(i), q, mu) / m);
  }
  report.ratio = ratio_or_one(report.lp_side, report.weak_side, report.violation);
  return report;
}

VmoEquivalence vmo_p_equivalence(const SimpleFunction& b, const Measure& mu, double p,
                                 std::span<const double> thresholds) {
  VmoEquivalence out;
  out.moduli_p = vmo_moduli(b, mu, p, thresholds);
  out.moduli_1 = vmo_moduli(b, mu, 1.0, thresholds);
  auto fill = [&](const std::vector<double>& hi, const std::vector<double>& lo, std::vector<double>& ratio) {
    for (std::size_t i = 0; i < hi.size(); ++i) {
      ratio.push_back(ratio_or_one(hi[i], lo[i], out.unbounded));
      if (std::isfinite(ratio.back())) out.max_ratio = std::max(out.max_ratio, ratio.back());
      if (lo[i] > hi[i] * (1.0 + kSlack)) out.holder_ok = false;
    }
  };
  fill(out.moduli_p.heavy, out.moduli_1.heavy, out.heavy_ratio);
  fill(out.moduli_p.light, out.moduli_1.light, out.light_ratio);
  fill(out.moduli_p.distant, out.moduli_1.distant, out.distant_ratio);
  return out;
}

double burkholder_constant(const SimpleFunction& b, const CubeCollection& collection, const Measure& mu) {
  double best = 0.0;
  for (CubeId q : collection) {
    const double m = mu.mass(q);
    const double o = osc(b, q, 1.0, mu);
    if (m <= 0.0 || o <= 0.0) continue;
    const double weak = weak_l1_norm(localized_martingale_sum(b, collection, q, mu), q, mu) / m;
    best = std::max(best, weak / o);
  }
  return best;
}

std::string forest_json(const StoppingForest& forest) {
  auto node_json = [&](auto&& self, std::size_t n) -> nlohmann::json {
    const ForestNode& node = forest.nodes[n];
    nlohmann::json j;
    j["cube"] = node.cube.value;
    j["generation"] = node.generation;
    j["B_local"] = node.b_local;
    j["children_mass"] = node.children_mass;
    j["children"] = nlohmann::json::array();
    for (std::size_t c : node.children) j["children"].push_back(self(self, c));
    return j;
  };
  nlohmann::json j;
  j["root"] = forest.root.value;
  j["gamma"] = forest.gamma;
  j["B"] = forest.B;
  j["C"] = forest.C;
  j["max_generation"] = forest.max_generation;
  j["forest"] = node_json(node_json, 0);
  return j.dump(2);
}

void write_tail_csv(std::ostream& out, const JnReport& report, int trial) {
  const auto old_precision = out.precision(17);
  for (const TailRow& row : report.tail) {
    out << trial << ',' << row.k << ',' << row.mass << ',' << row.bound << ',' << (row.ok ? 1 : 0) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace paravmo
