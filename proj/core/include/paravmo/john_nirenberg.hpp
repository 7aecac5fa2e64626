#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "paravmo/measure.hpp"
#include "paravmo/oscillation.hpp"
#include "paravmo/simple_function.hpp"

namespace paravmo {

/// Family {lambda_Q} over a collection of cubes, each lambda_Q supported on
/// Q and constant on each maximal member strictly inside Q.
class MartingaleFamily {
 public:
  /// lambdas[i] belongs to the i-th member of the collection (preorder).
  /// Throws std::invalid_argument when support or constancy fails.
  MartingaleFamily(const Measure& mu, CubeCollection collection, std::vector<SimpleFunction> lambdas);

  static MartingaleFamily zero(const Measure& mu, CubeCollection collection);
  /// lambda_Q = D_Q b. Leaves in the collection are rejected.
  static MartingaleFamily from_symbol(const SimpleFunction& b, const Measure& mu, CubeCollection collection);
  /// Independent normal values on each tree child of each member, times a
  /// per-cube amplitude scale * exp(log_spread * N(0,1)). Leaves in the
  /// collection get lambda = 0.
  static MartingaleFamily random(const Measure& mu, CubeCollection collection, std::uint64_t seed,
                                 double scale = 1.0, double log_spread = 0.0);
  /// lambda_Q = scale on the first child of Q for the leftmost member of each
  /// level, zero elsewhere. Cumulative sums pile up along the left edge.
  static MartingaleFamily lacunary(const Measure& mu, CubeCollection collection, double scale = 1.0);

  const Measure& measure() const { return *measure_; }
  const CubeCollection& collection() const { return collection_; }
  std::size_t size() const { return lambdas_.size(); }
  CubeId cube(std::size_t i) const { return collection_.ids()[i]; }
  std::size_t index_of(CubeId q) const;  // std::out_of_range for non-members
  const SimpleFunction& lambda(std::size_t i) const { return lambdas_[i]; }
  /// S_Q = sum of lambda_R over members R subseteq Q.
  const SimpleFunction& cumulative(std::size_t i) const { return cumulative_[i]; }
  /// Nearest member strictly containing member i, or npos.
  std::size_t member_parent(std::size_t i) const { return parent_[i]; }
  std::span<const std::size_t> member_children(std::size_t i) const { return children_[i]; }
  /// Every lambda_Q is constant on each tree child of Q.
  bool constant_on_dyadic_children() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::shared_ptr<const Measure> measure_;
  CubeCollection collection_;
  std::vector<SimpleFunction> lambdas_;
  std::vector<SimpleFunction> cumulative_;
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> index_;  // by cube id
};

/// || sum_{R in collection, R subseteq Q} lambda_R ||_{L^inf_gamma(Q)}.
double b_gamma_constant(const MartingaleFamily& family, CubeId q, double gamma = 0.25);

struct ForestNode {
  CubeId cube;
  int generation = 0;
  std::size_t parent = MartingaleFamily::npos;  // node index
  std::vector<std::size_t> children;            // node indices of the stopping children
  double b_local = 0.0;                         // B_F at gamma
  double children_mass = 0.0;
};

struct StoppingForest {
  CubeId root;
  double gamma = 0.25;
  double B = 0.0;  // sup of B_Q over members below the root
  double C = 0.0;  // sup of ||lambda_Q||_inf over members below the root
  std::vector<ForestNode> nodes;  // nodes[0] is the root
  std::vector<int> generation;    // per leaf; 0 outside the root
  int max_generation = 0;
};

/// Iterated maximal stopping cubes F' strictly inside F with
/// |sum_{F' strict subset Q subseteq F} lambda_Q| > 2B on F'.
/// The root must be a member of the collection.
StoppingForest build_stopping_forest(const MartingaleFamily& family, CubeId root, double gamma = 0.25);

struct TailRow {
  int k = 0;
  double mass = 0.0;   // mu(gen >= k)
  double bound = 0.0;  // 2^-k mu(F)
  bool ok = true;
};

struct JnReport {
  bool ok_half = true;
  bool ok_pointwise = true;
  bool ok_tail = true;
  double worst_half = 0.0;       // max children_mass / mu(F)
  double worst_pointwise = 0.0;  // max |S_F| / ((2B + C)(1 + gen)) over positive-weight leaves
  std::vector<TailRow> tail;
  bool ok() const { return ok_half && ok_pointwise && ok_tail; }
};

/// Checks every bound in the report with 1e-12 relative slack for rounding.
JnReport verify_jn_bounds(const StoppingForest& forest, const MartingaleFamily& family);

struct Jn2Row {
  CubeId cube;
  double lhs = 0.0;  // ||lambda_Q||_inf
  double rhs = 0.0;  // 2 sup_{R in Q(Q)} ||S_R||_{L^inf_{gamma_mu/2}(R)}
};
struct Jn2Report {
  double gamma_mu = 0.0;
  std::vector<Jn2Row> rows;
  bool ok = true;
};

/// Throws std::domain_error("not doubling") when gamma_mu = 0 on the
/// collection, std::invalid_argument when some lambda is not constant on
/// the tree children of its cube.
Jn2Report jn2_doubling_bound(const MartingaleFamily& family);

struct Jn3Report {
  double lp_side = 0.0;    // sup_Q mu(Q)^(-1/p) ||S_Q||_{L^p(Q)}
  double weak_side = 0.0;  // sup_Q mu(Q)^(-1) ||S_Q||_{L^{1,inf}(Q)}
  double ratio = 1.0;      // lp/weak; 1 when both vanish, inf when only weak does
  bool violation = false;
};
Jn3Report jn3_comparability(const MartingaleFamily& family, double p);

struct VmoEquivalence {
  VmoModuli moduli_p;
  VmoModuli moduli_1;
  /// Per threshold ratios moduli_p / moduli_1 (1 when both vanish).
  std::vector<double> heavy_ratio, light_ratio, distant_ratio;
  double max_ratio = 0.0;  // finite ratios only
  bool unbounded = false;  // a p-modulus is positive while its 1-modulus vanishes
  bool holder_ok = true;   // moduli_1 <= moduli_p everywhere
};
VmoEquivalence vmo_p_equivalence(const SimpleFunction& b, const Measure& mu, double p,
                                 std::span<const double> thresholds);

/// max over members Q with osc(b,Q,1) > 0 of
/// mu(Q)^-1 ||sum_{R in collection, R subseteq Q} D_R b||_{L^{1,inf}} / osc(b,Q,1).
double burkholder_constant(const SimpleFunction& b, const CubeCollection& collection, const Measure& mu);

std::string forest_json(const StoppingForest& forest);
void write_tail_csv(std::ostream& out, const JnReport& report, int trial = 0);

}  // namespace paravmo
