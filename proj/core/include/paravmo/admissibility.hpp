#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "paravmo/measure.hpp"
#include "paravmo/simple_function.hpp"

namespace paravmo {

/// Finite prefix F_1, ..., F_n of a sequence of sets of test functions in
/// L^p(mu).
struct TestFamilySequence {
  std::vector<std::vector<SimpleFunction>> sets;
  double p = 2.0;
  std::shared_ptr<const Measure> measure;

  TestFamilySequence(std::vector<std::vector<SimpleFunction>> sets, double p, const Measure& mu);
  /// One-element sets F_i = {f_i}.
  static TestFamilySequence singletons(std::vector<SimpleFunction> funcs, double p, const Measure& mu);

  std::size_t size() const { return sets.size(); }
  /// sup_i sup_{f in F_i} ||f||_p.
  double bound() const;
};

/// phi : N_+ -> [0, inf) improving on the triangle inequality for disjoint
/// functions of norm at most 1.
struct GrowthFunction {
  std::function<double(std::size_t)> phi;

  double operator()(std::size_t n) const { return phi(n); }
  /// phi(N) = N^(1/p), the L^p instance.
  static GrowthFunction lp(double p);
  /// phi(K)/K is nonincreasing on the grid 1..k_max and ends below its start.
  bool sublinear_on(std::size_t k_max) const;
};

/// values[d][i] = max_{f in F_i} |<f, duals[d]>|.
struct PairingProfile {
  std::vector<std::vector<double>> values;
};
PairingProfile pairing_profile(const TestFamilySequence& seq, const std::vector<SimpleFunction>& duals);

/// (1/K) ||sum_{k <= K} f_k||_p for K = 1..n.
std::vector<double> cesaro_profile(const std::vector<SimpleFunction>& funcs, double p, const Measure& mu);

/// Picks one element index out of a set.
using Chooser = std::function<std::size_t(const std::vector<SimpleFunction>&)>;
/// The element of largest L^p norm, first one on ties.
Chooser max_norm_chooser(double p, const Measure& mu);

enum class OverlapMode {
  left,   // ||1_{supp f_k} f_i||_p for earlier k
  right,  // ||1_{supp f_i} f_k||_p for earlier k
};

struct GreedySelection {
  OverlapMode mode = OverlapMode::left;
  std::vector<std::size_t> indices;     // set indices i of the selected terms
  std::vector<SimpleFunction> selected;
  std::vector<double> overlaps;         // max overlap against earlier selected terms
  std::vector<double> bounds;           // 2^(-2k) at selected position k = 1, 2, ...
};

/// Scans the sets in order and keeps a candidate when its overlap with the
/// terms kept so far is at most 2^(-2k), k its would-be position. First-fit,
/// so the result is a valid subsequence but not necessarily the longest.
GreedySelection greedy_disjoint_subsequence(const TestFamilySequence& seq, OverlapMode mode,
                                            const Chooser& chooser = {});

struct TriangleCheck {
  std::vector<double> lhs;  // ||sum_{i <= N} f_i||_p
  std::vector<double> rhs;  // 1 + phi(N)
  bool ok = true;
};
TriangleCheck improved_triangle_check(const std::vector<SimpleFunction>& selected, double p, const Measure& mu,
                                      const GrowthFunction& phi);

struct HilbertCheck {
  double bound = 0.0;
  /// profiles[f][i] = max_{g in F_i} |<g, f>| for the f-th element of the union.
  std::vector<std::vector<double>> profiles;
  std::vector<std::size_t> owner;  // set index of each f
  /// Every profile that extends past its own index ends below tolerance.
  bool consistent = true;
};
/// p must be 2 (std::invalid_argument otherwise).
HilbertCheck hilbert_admissibility_check(const TestFamilySequence& seq, double tolerance = 1e-6);

/// Lower bound for Cesàro means of a family pairing boundedly away from 0
/// against g: the terms whose pairing lies in the most populated quarter
/// sector have Cesàro means at least r cos(pi/4) / ||g||_{p'}.
struct SectorWitness {
  std::size_t sector = 0;           // rotation c = i^sector
  std::vector<std::size_t> terms;   // indices lying in that sector
  double r = 0.0;                   // min |<f, g>| over those terms
  double floor = 0.0;
  std::vector<double> cesaro;       // profile of the sector subsequence
  bool floor_holds = true;
  /// floor > tolerance: the family cannot be cancellative.
  bool non_admissible = false;
};
SectorWitness sector_witness(const std::vector<SimpleFunction>& funcs, const SimpleFunction& g, double p,
                             const Measure& mu, double tolerance = 1e-6);

/// Long format: kind,i,dual_id,value with kind in {pairing, cesaro}.
void write_profiles_csv(std::ostream& out, const PairingProfile& pairings, const std::vector<double>& cesaro);
std::string greedy_certificate_json(const GreedySelection& selection, const TriangleCheck& check);

}  // namespace paravmo
