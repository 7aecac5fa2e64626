#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "paravmo/measure.hpp"
#include "paravmo/oscillation.hpp"
#include "paravmo/simple_function.hpp"

namespace paravmo {

using LeafMatrix = Eigen::MatrixXcd;
using SparseFactor = Eigen::SparseMatrix<Complex>;

/// Trees up to this many leaves also keep the dense leaf matrix.
inline constexpr std::size_t kDenseLeafLimit = std::size_t{1} << 10;

/// Dyadic paraproduct P f = sum_{Q in collection} D_Q b <f>_Q 1_Q as an
/// explicit finite-rank operator on leaf coordinates.
///
/// Stored in factored form A = U V^T where column Q of U is D_Q b and
/// column Q of V is w 1_Q / mu(Q); both factors are sparse with one nonzero
/// per (leaf, cube containing it). Cubes of zero mass get zero columns.
class ParaproductOperator {
 public:
  const SimpleFunction& symbol() const { return symbol_; }
  const CubeCollection& collection() const { return collection_; }
  const Measure& measure() const { return *measure_; }
  double p() const { return p_; }

  const SparseFactor& left_factor() const { return u_; }
  const SparseFactor& right_factor() const { return v_; }
  bool has_dense() const { return dense_.has_value(); }
  /// Throws std::logic_error above kDenseLeafLimit leaves.
  const LeafMatrix& dense() const;

  /// P f through the factored form.
  SimpleFunction apply(const SimpleFunction& f) const;
  /// Number of cubes with a nonzero contribution; bounds the rank.
  std::size_t rank_bound() const { return nonzero_terms_; }

 private:
  friend ParaproductOperator assemble(const SimpleFunction&, const CubeCollection&, const Measure&, double);

  SimpleFunction symbol_;
  CubeCollection collection_;
  std::shared_ptr<const Measure> measure_;
  double p_ = 2.0;
  SparseFactor u_;
  SparseFactor v_;
  std::optional<LeafMatrix> dense_;
  std::size_t nonzero_terms_ = 0;
};

/// Throws std::invalid_argument when the collection contains a leaf.
ParaproductOperator assemble(const SimpleFunction& b, const CubeCollection& collection, const Measure& mu,
                             double p = 2.0);

/// The defining sum evaluated term by term from averages and martingale
/// differences, without any matrix. Reference path for assembly checks.
SimpleFunction paraproduct_by_definition(const SimpleFunction& b, const CubeCollection& collection,
                                         const SimpleFunction& f, const Measure& mu);

/// f_Q = 1_Q / mu(Q)^(1/p), or zero when mu(Q) = 0.
SimpleFunction testing_function(CubeId q, double p, const Measure& mu);

struct TestingInequality {
  double lhs = 0.0;  // osc(b, Q, p)
  double rhs = 0.0;  // 2 ||P_b f_Q||_p
  bool ok = true;
};

/// osc(b,Q,p) <= 2 ||P_b f_Q||_p. The operator must be assembled over all
/// non-leaf cubes (std::invalid_argument otherwise); p is the operator's tag.
TestingInequality osc_testing_inequality(const ParaproductOperator& full, CubeId q);
TestingInequality osc_testing_inequality(const SimpleFunction& b, CubeId q, double p, const Measure& mu);

/// sum_{R in collection, R subseteq Q} D_R b. Leaves in the collection are skipped.
SimpleFunction localized_martingale_sum(const SimpleFunction& b, const CubeCollection& collection, CubeId q,
                                        const Measure& mu);

/// sup_{Q in collection, mu(Q) > 0} mu(Q)^(-1/p) || localized_martingale_sum(Q) ||_p.
double carleson_testing_norm(const SimpleFunction& b, const CubeCollection& collection, double p,
                             const Measure& mu);

/// || sup_{R subseteq S subseteq Q} |<b>_R - <b>_S| 1_S ||_p with S in the
/// collection and R in the collection or among the children of its cubes.
/// The children are needed on a finite tree: the telescoped sum at x ends at
/// the child of the smallest collection cube containing x. With that range
/// the pointwise bound holds with constant 1.
/// Throws std::invalid_argument("connectedness required") for a
/// non-connected collection.
double telescoping_bound(const SimpleFunction& b, const CubeCollection& collection, CubeId q, double p,
                         const Measure& mu);

/// Singular values of the operator on L^2(mu), nonincreasing.
struct SingularSpectrum {
  std::vector<double> values;
  bool complete = true;  // false when only a_0 was estimated (large trees)

  double a(std::size_t k) const { return k < values.size() ? values[k] : 0.0; }
  double norm() const { return a(0); }
  /// Count of values above tolerance * max(1, a_0).
  std::size_t numerical_rank(double tolerance = 1e-10) const;
};

/// Exact L^2(mu) singular values: SVD of W^(1/2) A W^(-1/2) restricted to the
/// positive-weight leaves. Values below 1e-10 a_0 are reported as 0. Above
/// kDenseLeafLimit leaves only a_0 is computed, by power iteration.
/// Throws std::invalid_argument unless the operator's p tag is 2.
SingularSpectrum opnorm_p2(const ParaproductOperator& op);

struct PowerIterationResult {
  double norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// a_0 by power iteration on B^* B using only the sparse factors.
PowerIterationResult power_iteration_norm(const ParaproductOperator& op, std::uint64_t seed = 1,
                                          std::size_t max_iterations = 200000, double tolerance = 1e-15);

/// max ||P f||_p / ||f||_p over nonzero candidates; a certified lower bound.
double lower_bound_p(const ParaproductOperator& op, double p, std::span<const SimpleFunction> candidates);

/// Testing functions of every positive-mass cube plus `random_count`
/// seeded Gaussian functions.
std::vector<SimpleFunction> default_candidates(const Measure& mu, double p, std::size_t random_count,
                                               std::uint64_t seed);

enum class DiscardedPart { light, heavy, distant, total };
std::string to_string(DiscardedPart part);

struct PipelineRow {
  double M = 0.0;
  DiscardedPart part = DiscardedPart::total;
  std::size_t discarded_count = 0;
  double discarded_norm = 0.0;  // exact L^2 norm for p = 2, Carleson proxy otherwise
  bool norm_exact = true;
  double modulus = 0.0;         // the VMO modulus controlling this part
  double constant = 0.0;        // discarded_norm / modulus, 0 when modulus = 0
  std::size_t retained_count = 0;
  std::size_t retained_rank = 0;
};

struct SufficiencyReport {
  double p = 2.0;
  std::vector<PipelineRow> rows;
  /// Largest norm/modulus ratio seen, the recorded constant C(p, tree).
  double max_constant = 0.0;
  /// Rows whose discarded norm is positive while the modulus vanishes.
  std::size_t uncontrolled_rows = 0;
  bool rank_ok = true;  // retained_rank <= retained_count everywhere
};

/// Reduction pipeline over the full non-leaf collection: measure window
/// [1/M, M] first, then the anchor split against B(0, M). Discards the
/// cubes outside the window or the anchors and keeps the finite inner/outer rest.
/// Light and heavy rows are compared with the moduli at M; the distant row
/// with sup osc over cubes at least as far as its nearest discarded cube.
SufficiencyReport sufficiency_pipeline(const SimpleFunction& b, const Measure& mu, double p,
                                       std::span<const double> schedule);

void write_pipeline_csv(std::ostream& out, const SufficiencyReport& report);

/// Operator norm of a leaf matrix on L^p(mu): exact for p = 2, otherwise the
/// Riesz-Thorin bound ||T||_1^(1/p) ||T||_inf^(1-1/p).
struct LeafOperatorNorm {
  double value = 0.0;
  bool exact = false;
};
LeafOperatorNorm leaf_operator_norm(const LeafMatrix& t, double p, const Measure& mu);

struct UchiyamaReport {
  std::vector<double> cesaro;        // (1/N) ||sum_{n<=N} f_n||_p
  std::vector<double> image_cesaro;  // (1/N) ||sum_{n<=N} T f_n||_p
  double operator_norm = 0.0;
  bool norm_exact = false;
  double limit_norm = 0.0;           // last image_cesaro entry
  bool ok = true;
};

UchiyamaReport uchiyama_limit_check(const LeafMatrix& t, std::span<const SimpleFunction> family, double p,
                                    const Measure& mu);

}  // namespace paravmo
