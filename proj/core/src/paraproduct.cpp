#include "paravmo/paraproduct.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "paravmo/norms.hpp"
#include "paravmo/random.hpp"

namespace paravmo {

namespace {

using Vector = Eigen::VectorXcd;

Vector to_vector(const SimpleFunction& f) {
  Vector v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v[static_cast<Eigen::Index>(i)] = f[i];
  return v;
}

SimpleFunction to_function(const Vector& v) {
  std::vector<Complex> values(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) values[static_cast<std::size_t>(i)] = v[i];
  return SimpleFunction(std::move(values));
}

void require_non_leaf(const DyadicTree& tree, const CubeCollection& collection) {
  for (CubeId q : collection) {
    if (tree.is_leaf(q)) throw std::invalid_argument("paraproduct: leaf cube in collection has no children");
  }
}

/// avg(child) - avg(parent) for every non-root cube, indexed by the child.
std::vector<Complex> child_jumps(const SimpleFunction& b, const Measure& mu) {
  const DyadicTree& tree = mu.tree();
  const std::vector<Complex> avg = all_averages(b, mu);
  std::vector<Complex> jump(tree.cube_count());
  for (std::size_t i = 1; i < jump.size(); ++i) {
    jump[i] = avg[i] - avg[tree.cube(CubeId{static_cast<std::uint32_t>(i)}).parent];
  }
  return jump;
}

std::vector<std::size_t> positive_leaves(const Measure& mu) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < mu.leaf_count(); ++i) {
    if (mu.weight(i) > 0.0) s.push_back(i);
  }
  return s;
}

/// W^(1/2) T W^(-1/2) on the positive-weight leaves.
LeafMatrix weighted_restriction(const LeafMatrix& t, const Measure& mu, const std::vector<std::size_t>& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  LeafMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double wy = std::sqrt(mu.weight(s[static_cast<std::size_t>(j)]));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double wx = std::sqrt(mu.weight(s[static_cast<std::size_t>(i)]));
      out(i, j) = t(static_cast<Eigen::Index>(s[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(s[static_cast<std::size_t>(j)])) *
                  (wx / wy);
    }
  }
  return out;
}

std::vector<double> singular_values(const LeafMatrix& m) {
  if (m.size() == 0) return {};
  Eigen::BDCSVD<LeafMatrix> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  std::vector<double> values(sv.data(), sv.data() + sv.size());
  std::sort(values.begin(), values.end(), std::greater<>());
  const double cutoff = 1e-10 * (values.empty() ? 0.0 : values.front());
  for (double& v : values) {
    if (v <= cutoff) v = 0.0;
  }
  return values;
}

}  // namespace

const LeafMatrix& ParaproductOperator::dense() const {
  if (!dense_) throw std::logic_error("paraproduct: dense matrix not kept above the dense leaf limit");
  return *dense_;
}

SimpleFunction ParaproductOperator::apply(const SimpleFunction& f) const {
  if (f.size() != measure_->leaf_count()) throw std::invalid_argument("paraproduct: leaf count mismatch");
  const Vector coefficients = v_.transpose() * to_vector(f);
  return to_function(u_ * coefficients);
}

ParaproductOperator assemble(const SimpleFunction& b, const CubeCollection& collection, const Measure& mu,
                             double p) {
  const DyadicTree& tree = mu.tree();
  if (b.size() != tree.leaf_count()) throw std::invalid_argument("paraproduct: symbol has wrong leaf count");
  if (!(p >= 1.0)) throw std::invalid_argument("paraproduct: p must be >= 1");
  require_non_leaf(tree, collection);

  ParaproductOperator op;
  op.symbol_ = b;
  op.collection_ = collection;
  op.measure_ = std::make_shared<const Measure>(mu);
  op.p_ = p;

  const std::vector<Complex> jump = child_jumps(b, mu);
  using Triplet = Eigen::Triplet<Complex>;
  std::vector<Triplet> u;
  std::vector<Triplet> v;
  const auto n = static_cast<Eigen::Index>(tree.leaf_count());
  const auto m = static_cast<Eigen::Index>(collection.size());
  Eigen::Index column = 0;
  for (CubeId q : collection) {
    const double mass = mu.mass(q);
    if (mass > 0.0) {
      bool nonzero = false;
      for (CubeId child : tree.children(q)) {
        const Complex d = jump[child.value];
        if (d == Complex{}) continue;
        nonzero = true;
        const LeafRange r = tree.leaves(child);
        for (std::size_t x = r.begin; x < r.end; ++x) u.emplace_back(static_cast<Eigen::Index>(x), column, d);
      }
      if (nonzero) {
        ++op.nonzero_terms_;
        const LeafRange r = tree.leaves(q);
        for (std::size_t y = r.begin; y < r.end; ++y) {
          if (mu.weight(y) > 0.0) v.emplace_back(static_cast<Eigen::Index>(y), column, mu.weight(y) / mass);
        }
      }
    }
    ++column;
  }
  op.u_.resize(n, m);
  op.u_.setFromTriplets(u.begin(), u.end());
  op.v_.resize(n, m);
  op.v_.setFromTriplets(v.begin(), v.end());
  if (tree.leaf_count() <= kDenseLeafLimit) {
    const SparseFactor vt = op.v_.transpose();
    op.dense_ = LeafMatrix(op.u_ * vt);
  }
  return op;
}

SimpleFunction paraproduct_by_definition(const SimpleFunction& b, const CubeCollection& collection,
                                         const SimpleFunction& f, const Measure& mu) {
  const DyadicTree& tree = mu.tree();
  require_non_leaf(tree, collection);
  SimpleFunction out(tree.leaf_count());
  for (CubeId q : collection) {
    if (mu.mass(q) <= 0.0) continue;
    out += martingale_difference(b, q, mu) * average(f, q, mu);
  }
  return out;
}

SimpleFunction testing_function(CubeId q, double p, const Measure& mu) {
  const double m = mu.mass(q);
  if (m <= 0.0) return SimpleFunction(mu.leaf_count());
  return SimpleFunction::indicator(mu.tree(), q, std::pow(m, -1.0 / p));
}

TestingInequality osc_testing_inequality(const ParaproductOperator& full, CubeId q) {
  const Measure& mu = full.measure();
  if (!(full.collection() == CubeCollection::non_leaf(mu.tree()))) {
    throw std::invalid_argument("osc_testing_inequality: operator must be assembled over all non-leaf cubes");
  }
  TestingInequality out;
  out.lhs = osc(full.symbol(), q, full.p(), mu);
  out.rhs = 2.0 * lp_norm(full.apply(testing_function(q, full.p(), mu)), full.p(), mu);
  out.ok = out.lhs <= out.rhs + 1e-9;
  return out;
}

TestingInequality osc_testing_inequality(const SimpleFunction& b, CubeId q, double p, const Measure& mu) {
  return osc_testing_inequality(assemble(b, CubeCollection::non_leaf(mu.tree()), mu, p), q);
}

SimpleFunction localized_martingale_sum(const SimpleFunction& b, const CubeCollection& collection, CubeId q,
                                        const Measure& mu) {
  const DyadicTree& tree = mu.tree();
  const std::vector<Complex> jump = child_jumps(b, mu);
  SimpleFunction out(tree.leaf_count());
  for (CubeId r : collection) {
    if (tree.is_leaf(r) || !tree.contains(q, r) || mu.mass(r) <= 0.0) continue;
    for (CubeId child : tree.children(r)) {
      const LeafRange range = tree.leaves(child);
      for (std::size_t x = range.begin; x < range.end; ++x) out[x] += jump[child.value];
    }
  }
  return out;
}

double carleson_testing_norm(const SimpleFunction& b, const CubeCollection& collection, double p,
                             const Measure& mu) {
  if (!(p >= 1.0)) throw std::invalid_argument("carleson_testing_norm: p must be >= 1");
  const DyadicTree& tree = mu.tree();
  if (collection.empty()) return 0.0;
  const std::vector<Complex> jump = child_jumps(b, mu);
  std::vector<double> acc(tree.cube_count(), 0.0);
  for (std::size_t x = 0; x < tree.leaf_count(); ++x) {
    const double w = mu.weight(x);
    if (w <= 0.0) continue;
    Complex partial{};
    std::uint32_t cur = tree.leaf_cube(x).value;
    for (std::uint32_t r = tree.cube(CubeId{cur}).parent; r != kNoCube; cur = r, r = tree.cube(CubeId{r}).parent) {
      if (!collection.contains(CubeId{r})) continue;
      if (mu.mass(CubeId{r}) > 0.0) partial += jump[cur];
      acc[r] += (p == 2.0 ? std::norm(partial) : std::pow(std::abs(partial), p)) * w;
    }
  }
  double best = 0.0;
  for (CubeId q : collection) {
    const double m = mu.mass(q);
    if (m <= 0.0) continue;
    best = std::max(best, std::pow(acc[q.value] / m, 1.0 / p));
  }
  return best;
}

double telescoping_bound(const SimpleFunction& b, const CubeCollection& collection, CubeId q, double p,
                         const Measure& mu) {
  const DyadicTree& tree = mu.tree();
  if (!collection.is_connected(tree)) throw std::invalid_argument("connectedness required");
  const std::vector<Complex> avg = all_averages(b, mu);

  // Cubes R allowed on the inner side: collection members and their children.
  std::vector<bool> inner(tree.cube_count(), false);
  for (CubeId r : collection) {
    inner[r.value] = true;
    for (CubeId c : tree.children(r)) inner[c.value] = true;
  }

  std::vector<double> g(tree.leaf_count(), 0.0);
  for (CubeId s : collection) {
    if (!tree.contains(q, s)) continue;
    double spread = 0.0;
    for (std::uint32_t r = s.value; r < tree.subtree_end(s); ++r) {
      if (inner[r]) spread = std::max(spread, std::abs(avg[r] - avg[s.value]));
    }
    const LeafRange range = tree.leaves(s);
    for (std::size_t x = range.begin; x < range.end; ++x) g[x] = std::max(g[x], spread);
  }
  return lp_norm(SimpleFunction::from_real(g), p, mu);
}

std::size_t SingularSpectrum::numerical_rank(double tolerance) const {
  const double cutoff = tolerance * std::max(1.0, norm());
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [&](double v) { return v > cutoff; }));
}

SingularSpectrum opnorm_p2(const ParaproductOperator& op) {
  if (op.p() != 2.0) throw std::invalid_argument("opnorm_p2: operator is tagged with p != 2");
  SingularSpectrum out;
  if (!op.has_dense()) {
    out.values = {power_iteration_norm(op).norm};
    out.complete = false;
    return out;
  }
  const std::vector<std::size_t> s = positive_leaves(op.measure());
  out.values = singular_values(weighted_restriction(op.dense(), op.measure(), s));
  return out;
}

PowerIterationResult power_iteration_norm(const ParaproductOperator& op, std::uint64_t seed,
                                          std::size_t max_iterations, double tolerance) {
  const Measure& mu = op.measure();
  const auto n = static_cast<Eigen::Index>(mu.leaf_count());
  Eigen::VectorXd sqrt_w(n);
  Eigen::VectorXd inv_sqrt_w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = mu.weight(static_cast<std::size_t>(i));
    sqrt_w[i] = std::sqrt(w);
    inv_sqrt_w[i] = w > 0.0 ? 1.0 / std::sqrt(w) : 0.0;
  }
  const SparseFactor& u = op.left_factor();
  const SparseFactor& v = op.right_factor();
  // B = W^(1/2) U V^T W^(-1/2) on positive-weight leaves; null leaves stay 0.
  auto apply_b = [&](const Vector& x) -> Vector {
    const Vector t = v.transpose() * inv_sqrt_w.cwiseProduct(x);
    return sqrt_w.cwiseProduct(u * t);
  };
  auto apply_b_adjoint = [&](const Vector& y) -> Vector {
    const Vector t = u.adjoint() * sqrt_w.cwiseProduct(y);
    return inv_sqrt_w.cwiseProduct(v * t);
  };

  Rng rng(seed);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = inv_sqrt_w[i] > 0.0 ? Complex(rng.normal(), rng.normal()) : Complex{};
  }
  PowerIterationResult out;
  if (x.norm() == 0.0) {
    out.converged = true;
    return out;
  }
  x.normalize();
  double theta = 0.0;
  double previous_step = 0.0;
  for (std::size_t k = 1; k <= max_iterations; ++k) {
    const Vector y = apply_b(x);
    const double next = y.squaredNorm();
    out.iterations = k;
    if (next == 0.0) {
      out.converged = true;
      theta = 0.0;
      break;
    }
    const double step = next - theta;
    theta = next;
    Vector z = apply_b_adjoint(y);
    const double zn = z.norm();
    if (zn == 0.0) {
      out.converged = true;
      break;
    }
    x = z / zn;
    if (k > 3) {
      if (step <= 4.0 * std::numeric_limits<double>::epsilon() * theta) {
        out.converged = true;
        break;
      }
      // Geometric tail estimate of the remaining Rayleigh-quotient error.
      const double ratio = previous_step > 0.0 ? std::clamp(step / previous_step, 0.0, 1.0 - 1e-12) : 0.0;
      if (step * ratio / (1.0 - ratio) <= tolerance * theta) {
        out.converged = true;
        break;
      }
    }
    previous_step = step;
  }
  out.norm = std::sqrt(theta);
  return out;
}

double lower_bound_p(const ParaproductOperator& op, double p, std::span<const SimpleFunction> candidates) {
  const Measure& mu = op.measure();
  double best = 0.0;
  for (const SimpleFunction& f : candidates) {
    const double denom = lp_norm(f, p, mu);
    if (denom <= 0.0) continue;
    best = std::max(best, lp_norm(op.apply(f), p, mu) / denom);
  }
  return best;
}

std::vector<SimpleFunction> default_candidates(const Measure& mu, double p, std::size_t random_count,
                                               std::uint64_t seed) {
  std::vector<SimpleFunction> out;
  for (CubeId q : mu.tree().all_cubes()) {
    if (mu.mass(q) > 0.0) out.push_back(testing_function(q, p, mu));
  }
  Rng rng(seed);
  for (std::size_t k = 0; k < random_count; ++k) {
    SimpleFunction f(mu.leaf_count());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.normal();
    out.push_back(std::move(f));
  }
  return out;
}

std::string to_string(DiscardedPart part) {
  switch (part) {
    case DiscardedPart::light: return "light";
    case DiscardedPart::heavy: return "heavy";
    case DiscardedPart::distant: return "distant";
    case DiscardedPart::total: return "total";
  }
  return "unknown";
}

SufficiencyReport sufficiency_pipeline(const SimpleFunction& b, const Measure& mu, double p,
                                       std::span<const double> schedule) {
  const DyadicTree& tree = mu.tree();
  const CubeCollection full = CubeCollection::non_leaf(tree);
  const std::vector<double> o = all_oscillations(b, p, mu);

  auto part_norm = [&](const CubeCollection& part) {
    if (part.empty()) return 0.0;
    if (p == 2.0) return opnorm_p2(assemble(b, part, mu, 2.0)).norm();
    return carleson_testing_norm(b, part, p, mu);
  };
  auto sup_osc = [&](auto&& keep) {
    double best = 0.0;
    for (CubeId q : tree.all_cubes()) {
      if (keep(q)) best = std::max(best, o[q.value]);
    }
    return best;
  };

  SufficiencyReport report;
  report.p = p;
  for (const double M : schedule) {
    const MeasurePartition by_measure = partition_by_measure(full, mu, M);
    const CubeCollection light = by_measure.rest.filter(tree, [&](CubeId q) { return mu.mass(q) < 1.0 / M; });
    const CubeCollection heavy = by_measure.rest.minus(tree, light);
    const ReductionPartition reduction = partition_reduction(by_measure.bounded, mu, M);
    const CubeCollection retained = reduction.inner.united(tree, reduction.outer);
    const CubeCollection discarded = by_measure.rest.united(tree, reduction.distant);

    // Cubes missing the anchors can lie closer than M when leaves are
    // coarse, so the distant part is measured against the distance its own
    // closest cube actually has.
    double distant_modulus = 0.0;
    if (!reduction.distant.empty()) {
      DyadicRational nearest = tree.cube(*reduction.distant.begin()).dist2;
      for (CubeId q : reduction.distant) nearest = std::min(nearest, tree.cube(q).dist2);
      distant_modulus = sup_osc([&](CubeId q) { return tree.cube(q).dist2 >= nearest; });
    }
    const double light_modulus = sup_osc([&](CubeId q) { return mu.mass(q) <= 1.0 / M; });
    const double heavy_modulus = sup_osc([&](CubeId q) { return mu.mass(q) >= M; });

    std::size_t rank = 0;
    if (!retained.empty()) {
      const ParaproductOperator kept = assemble(b, retained, mu, 2.0);
      rank = kept.has_dense() ? opnorm_p2(kept).numerical_rank() : kept.rank_bound();
    }
    if (rank > retained.size()) report.rank_ok = false;

    const struct {
      DiscardedPart part;
      const CubeCollection& cubes;
      double modulus;
    } parts[] = {
        {DiscardedPart::light, light, light_modulus},
        {DiscardedPart::heavy, heavy, heavy_modulus},
        {DiscardedPart::distant, reduction.distant, distant_modulus},
        {DiscardedPart::total, discarded, std::max({light_modulus, heavy_modulus, distant_modulus})},
    };
    for (const auto& part : parts) {
      PipelineRow row;
      row.M = M;
      row.part = part.part;
      row.discarded_count = part.cubes.size();
      row.discarded_norm = part_norm(part.cubes);
      row.norm_exact = p == 2.0;
      row.modulus = part.modulus;
      row.constant = part.modulus > 0.0 ? row.discarded_norm / part.modulus : 0.0;
      row.retained_count = retained.size();
      row.retained_rank = rank;
      report.max_constant = std::max(report.max_constant, row.constant);
      if (row.modulus <= 0.0 && row.discarded_norm > 1e-12) ++report.uncontrolled_rows;
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_pipeline_csv(std::ostream& out, const SufficiencyReport& report) {
  const auto old_precision = out.precision(17);
  out << "M,part,discarded_norm,modulus,retained_rank,retained_count,discarded_count,constant,norm_exact\n";
  for (const PipelineRow& row : report.rows) {
    out << row.M << ',' << to_string(row.part) << ',' << row.discarded_norm << ',' << row.modulus << ','
        << row.retained_rank << ',' << row.retained_count << ',' << row.discarded_count << ',' << row.constant << ','
        << (row.norm_exact ? 1 : 0) << '\n';
  }
  out.precision(old_precision);
}

LeafOperatorNorm leaf_operator_norm(const LeafMatrix& t, double p, const Measure& mu) {
  const auto n = static_cast<Eigen::Index>(mu.leaf_count());
  if (t.rows() != n || t.cols() != n) throw std::invalid_argument("leaf_operator_norm: matrix size mismatch");
  const std::vector<std::size_t> s = positive_leaves(mu);
  LeafOperatorNorm out;
  if (p == 2.0) {
    const std::vector<double> sv = singular_values(weighted_restriction(t, mu, s));
    out.value = sv.empty() ? 0.0 : sv.front();
    out.exact = true;
    return out;
  }
  double norm1 = 0.0;
  double norm_inf = 0.0;
  for (std::size_t y : s) {
    double column = 0.0;
    for (std::size_t x : s) {
      column += mu.weight(x) * std::abs(t(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)));
    }
    norm1 = std::max(norm1, column / mu.weight(y));
  }
  for (std::size_t x : s) {
    double row = 0.0;
    for (std::size_t y : s) row += std::abs(t(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)));
    norm_inf = std::max(norm_inf, row);
  }
  out.value = std::pow(norm1, 1.0 / p) * std::pow(norm_inf, 1.0 - 1.0 / p);
  out.exact = p == 1.0;
  return out;
}

UchiyamaReport uchiyama_limit_check(const LeafMatrix& t, std::span<const SimpleFunction> family, double p,
                                    const Measure& mu) {
  UchiyamaReport out;
  const LeafOperatorNorm norm = leaf_operator_norm(t, p, mu);
  out.operator_norm = norm.value;
  out.norm_exact = norm.exact;
  SimpleFunction sum(mu.leaf_count());
  for (std::size_t n = 0; n < family.size(); ++n) {
    SimpleFunction f = family[n];
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (mu.weight(i) <= 0.0) f[i] = 0.0;
    }
    sum += f;
    const double scale = 1.0 / static_cast<double>(n + 1);
    const double c = scale * lp_norm(sum, p, mu);
    const double g = scale * lp_norm(to_function(t * to_vector(sum)), p, mu);
    out.cesaro.push_back(c);
    out.image_cesaro.push_back(g);
    if (g > out.operator_norm * c * (1.0 + 1e-12) + 1e-12) out.ok = false;
  }
  out.limit_norm = out.image_cesaro.empty() ? 0.0 : out.image_cesaro.back();
  return out;
}

}  // namespace paravmo
