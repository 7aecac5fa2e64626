#include "paravmo/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "paravmo/norms.hpp"

namespace paravmo {

namespace {

SimpleFunction support_indicator(const SimpleFunction& f) {
  SimpleFunction out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] != Complex{} ? 1.0 : 0.0;
  return out;
}

double dual_norm(const SimpleFunction& g, double p, const Measure& mu) {
  if (p == 1.0) return essential_sup(g, mu.tree().root(), mu);
  return lp_norm(g, p / (p - 1.0), mu);
}

}  // namespace

TestFamilySequence::TestFamilySequence(std::vector<std::vector<SimpleFunction>> sets_, double p_, const Measure& mu)
    : sets(std::move(sets_)), p(p_), measure(std::make_shared<const Measure>(mu)) {
  if (!(p >= 1.0)) throw std::invalid_argument("test family: p must be >= 1");
  for (const auto& set : sets) {
    for (const SimpleFunction& f : set) {
      if (f.size() != mu.leaf_count()) throw std::invalid_argument("test family: leaf count mismatch");
    }
  }
}

TestFamilySequence TestFamilySequence::singletons(std::vector<SimpleFunction> funcs, double p, const Measure& mu) {
  std::vector<std::vector<SimpleFunction>> sets;
  sets.reserve(funcs.size());
  for (SimpleFunction& f : funcs) sets.push_back({std::move(f)});
  return {std::move(sets), p, mu};
}

double TestFamilySequence::bound() const {
  double best = 0.0;
  for (const auto& set : sets) {
    for (const SimpleFunction& f : set) best = std::max(best, lp_norm(f, p, *measure));
  }
  return best;
}

GrowthFunction GrowthFunction::lp(double p) {
  return {[p](std::size_t n) { return std::pow(static_cast<double>(n), 1.0 / p); }};
}

bool GrowthFunction::sublinear_on(std::size_t k_max) const {
  if (k_max < 2) return true;
  double previous = phi(1);
  for (std::size_t k = 2; k <= k_max; ++k) {
    const double ratio = phi(k) / static_cast<double>(k);
    if (ratio > previous) return false;
    previous = ratio;
  }
  return previous < phi(1);
}

PairingProfile pairing_profile(const TestFamilySequence& seq, const std::vector<SimpleFunction>& duals) {
  if (duals.empty()) throw std::invalid_argument("pairing_profile: no dual functions");
  PairingProfile out;
  for (const SimpleFunction& g : duals) {
    std::vector<double> row;
    row.reserve(seq.size());
    for (const auto& set : seq.sets) {
      double best = 0.0;
      for (const SimpleFunction& f : set) best = std::max(best, std::abs(pairing(f, g, *seq.measure)));
      row.push_back(best);
    }
    out.values.push_back(std::move(row));
  }
  return out;
}

std::vector<double> cesaro_profile(const std::vector<SimpleFunction>& funcs, double p, const Measure& mu) {
  std::vector<double> out;
  out.reserve(funcs.size());
  SimpleFunction sum(mu.leaf_count());
  for (std::size_t k = 0; k < funcs.size(); ++k) {
    sum += funcs[k];
    out.push_back(lp_norm(sum, p, mu) / static_cast<double>(k + 1));
  }
  return out;
}

Chooser max_norm_chooser(double p, const Measure& mu) {
  return [p, &mu](const std::vector<SimpleFunction>& set) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t j = 0; j < set.size(); ++j) {
      const double n = lp_norm(set[j], p, mu);
      if (n > best_norm) {
        best_norm = n;
        best = j;
      }
    }
    return best;
  };
}

GreedySelection greedy_disjoint_subsequence(const TestFamilySequence& seq, OverlapMode mode, const Chooser& chooser) {
  const Measure& mu = *seq.measure;
  const Chooser choose = chooser ? chooser : max_norm_chooser(seq.p, mu);
  GreedySelection out;
  out.mode = mode;
  std::vector<SimpleFunction> supports;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& set = seq.sets[i];
    if (set.empty()) continue;
    const SimpleFunction& candidate = set[choose(set)];
    const SimpleFunction support = support_indicator(candidate);
    const double bound = std::ldexp(1.0, -2 * static_cast<int>(out.selected.size() + 1));
    double overlap = 0.0;
    for (std::size_t k = 0; k < out.selected.size(); ++k) {
      const SimpleFunction piece =
          mode == OverlapMode::left ? candidate.times(supports[k]) : out.selected[k].times(support);
      overlap = std::max(overlap, lp_norm(piece, seq.p, mu));
      if (overlap > bound) break;
    }
    if (overlap > bound) continue;
    out.indices.push_back(i);
    out.selected.push_back(candidate);
    out.overlaps.push_back(overlap);
    out.bounds.push_back(bound);
    supports.push_back(support);
  }
  return out;
}

TriangleCheck improved_triangle_check(const std::vector<SimpleFunction>& selected, double p, const Measure& mu,
                                      const GrowthFunction& phi) {
  TriangleCheck out;
  SimpleFunction sum(mu.leaf_count());
  for (std::size_t n = 0; n < selected.size(); ++n) {
    sum += selected[n];
    out.lhs.push_back(lp_norm(sum, p, mu));
    out.rhs.push_back(1.0 + phi(n + 1));
    if (out.lhs.back() > out.rhs.back()) out.ok = false;
  }
  return out;
}

HilbertCheck hilbert_admissibility_check(const TestFamilySequence& seq, double tolerance) {
  if (seq.p != 2.0) throw std::invalid_argument("hilbert_admissibility_check: requires p = 2");
  const Measure& mu = *seq.measure;
  HilbertCheck out;
  out.bound = seq.bound();
  for (std::size_t owner = 0; owner < seq.size(); ++owner) {
    for (const SimpleFunction& f : seq.sets[owner]) {
      std::vector<double> profile;
      profile.reserve(seq.size());
      for (const auto& set : seq.sets) {
        double best = 0.0;
        for (const SimpleFunction& g : set) best = std::max(best, std::abs(pairing(g, f, mu)));
        profile.push_back(best);
      }
      if (owner + 1 < seq.size() && profile.back() >= tolerance) out.consistent = false;
      out.profiles.push_back(std::move(profile));
      out.owner.push_back(owner);
    }
  }
  return out;
}

SectorWitness sector_witness(const std::vector<SimpleFunction>& funcs, const SimpleFunction& g, double p,
                             const Measure& mu, double tolerance) {
  SectorWitness out;
  std::vector<std::vector<std::size_t>> sectors(4);
  std::vector<double> magnitude(funcs.size());
  for (std::size_t i = 0; i < funcs.size(); ++i) {
    const Complex z = pairing(funcs[i], g, mu);
    magnitude[i] = std::abs(z);
    // Sector s holds arguments in [s pi/2 - pi/4, s pi/2 + pi/4).
    const double angle = std::arg(z) + std::numbers::pi / 4.0;
    const double turn = std::floor(angle / (std::numbers::pi / 2.0));
    sectors[static_cast<std::size_t>(((static_cast<long>(turn) % 4) + 4) % 4)].push_back(i);
  }
  for (std::size_t s = 0; s < 4; ++s) {
    if (sectors[s].size() > sectors[out.sector].size()) out.sector = s;
  }
  out.terms = sectors[out.sector];
  if (out.terms.empty()) return out;
  out.r = magnitude[out.terms.front()];
  std::vector<SimpleFunction> sub;
  for (std::size_t i : out.terms) {
    out.r = std::min(out.r, magnitude[i]);
    sub.push_back(funcs[i]);
  }
  const double gn = dual_norm(g, p, mu);
  out.floor = gn > 0.0 ? out.r * std::cos(std::numbers::pi / 4.0) / gn : 0.0;
  out.cesaro = cesaro_profile(sub, p, mu);
  for (double c : out.cesaro) {
    if (c < out.floor * (1.0 - 1e-12)) out.floor_holds = false;
  }
  out.non_admissible = out.floor > tolerance;
  return out;
}

void write_profiles_csv(std::ostream& out, const PairingProfile& pairings, const std::vector<double>& cesaro) {
  const auto old_precision = out.precision(17);
  out << "kind,i,dual_id,value\n";
  for (std::size_t d = 0; d < pairings.values.size(); ++d) {
    for (std::size_t i = 0; i < pairings.values[d].size(); ++i) {
      out << "pairing," << i + 1 << ',' << d << ',' << pairings.values[d][i] << '\n';
    }
  }
  for (std::size_t k = 0; k < cesaro.size(); ++k) out << "cesaro," << k + 1 << ",," << cesaro[k] << '\n';
  out.precision(old_precision);
}

std::string greedy_certificate_json(const GreedySelection& selection, const TriangleCheck& check) {
  nlohmann::json j;
  j["mode"] = selection.mode == OverlapMode::left ? "left" : "right";
  j["indices"] = selection.indices;
  j["overlaps"] = selection.overlaps;
  j["bounds"] = selection.bounds;
  j["triangle_lhs"] = check.lhs;
  j["triangle_rhs"] = check.rhs;
  j["ok"] = check.ok;
  return j.dump(2);
}

}  // namespace paravmo
