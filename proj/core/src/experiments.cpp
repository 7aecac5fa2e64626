#include "paravmo/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "paravmo/admissibility.hpp"
#include "paravmo/generators.hpp"
#include "paravmo/john_nirenberg.hpp"
#include "paravmo/norms.hpp"
#include "paravmo/oscillation.hpp"
#include "paravmo/paraproduct.hpp"

namespace paravmo {

namespace {

using nlohmann::json;

void violation(RunResult& result, const std::string& what) {
  ++result.violations;
  result.messages.push_back(what);
}

bool want_json(const ExperimentConfig& config) {
  if (config.format == "json") return true;
  if (config.format == "csv") return false;
  throw std::invalid_argument("--format must be csv or json");
}

SimpleFunction trial_symbol(const ExperimentConfig& config, const Measure& mu, std::uint64_t seed) {
  return make_symbol(GeneratorSpec::parse(config.symbol), mu, seed);
}

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return true;
}

json moduli_json(const VmoModuli& m) {
  return {{"p", m.p}, {"M", m.thresholds}, {"heavy", m.heavy}, {"light", m.light}, {"distant", m.distant}};
}

}  // namespace

std::vector<double> ExperimentConfig::threshold_grid() const {
  return thresholds.empty() ? default_thresholds() : thresholds;
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["command"] = command;
  j["depth"] = depth;
  j["dim"] = dim;
  j["coarsest"] = coarsest;
  j["p"] = p;
  j["measure"] = measure;
  j["symbol"] = symbol;
  j["seed"] = seed;
  j["thresholds"] = threshold_grid();
  j["trials"] = trials;
  j["family"] = family;
  j["format"] = format;
  j["out"] = out;
  return j.dump(2);
}

TreePtr make_tree(const ExperimentConfig& config) {
  if (config.depth < 0) throw std::invalid_argument("--depth must be >= 0");
  if (config.dim < 1) throw std::invalid_argument("--dim must be >= 1");
  if (!(config.p >= 1.0)) throw std::invalid_argument("--p must be >= 1");
  return std::make_shared<const DyadicTree>(config.dim, config.coarsest, config.coarsest + config.depth);
}

Measure make_trial_measure(const ExperimentConfig& config, std::uint64_t seed) {
  return make_measure(GeneratorSpec::parse(config.measure), make_tree(config), seed);
}

RunResult run_moduli(const ExperimentConfig& config, std::ostream& out) {
  RunResult result;
  const Measure mu = make_trial_measure(config, config.seed);
  const SimpleFunction b = trial_symbol(config, mu, config.seed);
  const VmoModuli m = vmo_moduli(b, mu, config.p, config.threshold_grid());
  if (!nonincreasing(m.heavy) || !nonincreasing(m.light) || !nonincreasing(m.distant)) {
    violation(result, "moduli not monotone in M");
  }
  if (want_json(config)) {
    out << moduli_json(m).dump(2) << '\n';
  } else {
    write_moduli_csv(out, m);
  }
  return result;
}

RunResult run_opnorm(const ExperimentConfig& config, std::ostream& out) {
  RunResult result;
  const bool as_json = want_json(config);
  const double p = config.p;
  json rows = json::array();
  const auto old_precision = out.precision(17);
  if (!as_json) out << "trial,seed,bmo,a0,carleson,lower_bound,bmo_over_a0,a0_over_carleson,necessity_ok\n";

  for (std::size_t t = 0; t < config.trials; ++t) {
    const std::uint64_t seed = config.seed + t;
    const Measure mu = make_trial_measure(config, seed);
    const DyadicTree& tree = mu.tree();
    const SimpleFunction b = trial_symbol(config, mu, seed);
    const ParaproductOperator op = assemble(b, CubeCollection::non_leaf(tree), mu, p);

    bool necessity = true;
    for (CubeId q : tree.all_cubes()) necessity = necessity && osc_testing_inequality(op, q).ok;
    if (!necessity) violation(result, "necessity inequality failed in trial " + std::to_string(t));

    const double bmo = bmo_norm(b, CubeCollection::all(tree), p, mu);
    const double carleson = carleson_testing_norm(b, op.collection(), p, mu);
    const std::vector<SimpleFunction> candidates = default_candidates(mu, p, 8, seed);
    const double lower = lower_bound_p(op, p, candidates);
    double a0 = std::numeric_limits<double>::quiet_NaN();
    SingularSpectrum spectrum;
    if (p == 2.0) {
      spectrum = opnorm_p2(op);
      a0 = spectrum.norm();
      const double tol = 1e-9 * std::max(1.0, a0);
      if (bmo > 2.0 * a0 + tol) violation(result, "bmo > 2 a0 in trial " + std::to_string(t));
      if (carleson > 2.0 * a0 + tol) violation(result, "carleson > 2 a0 in trial " + std::to_string(t));
      if (lower > a0 + tol) violation(result, "lower bound exceeds a0 in trial " + std::to_string(t));
    }
    const double bmo_over_a0 = a0 > 0.0 ? bmo / a0 : (bmo > 0.0 ? INFINITY : 1.0);
    const double a0_over_carleson = carleson > 0.0 ? a0 / carleson : (a0 > 0.0 ? INFINITY : 1.0);

    if (as_json) {
      json row{{"trial", t},         {"seed", seed},   {"bmo", bmo},
               {"carleson", carleson}, {"lower_bound", lower}, {"necessity_ok", necessity}};
      if (p == 2.0) {
        row["a0"] = a0;
        row["spectrum"] = spectrum.values;
      }
      rows.push_back(std::move(row));
    } else {
      out << t << ',' << seed << ',' << bmo << ',' << a0 << ',' << carleson << ',' << lower << ',' << bmo_over_a0 << ','
          << a0_over_carleson << ',' << (necessity ? 1 : 0) << '\n';
    }
  }
  if (as_json) out << rows.dump(2) << '\n';
  out.precision(old_precision);
  return result;
}

RunResult run_compactness(const ExperimentConfig& config, std::ostream& out) {
  RunResult result;
  const Measure mu = make_trial_measure(config, config.seed);
  const SimpleFunction b = trial_symbol(config, mu, config.seed);
  const std::vector<double> schedule = config.threshold_grid();
  const SufficiencyReport report = sufficiency_pipeline(b, mu, config.p, schedule);
  if (!report.rank_ok) violation(result, "retained rank exceeds retained cube count");
  if (report.uncontrolled_rows > 0) {
    violation(result, std::to_string(report.uncontrolled_rows) + " discarded parts with vanishing modulus");
  }
  if (want_json(config)) {
    json rows = json::array();
    for (const PipelineRow& r : report.rows) {
      rows.push_back({{"M", r.M},
                      {"part", to_string(r.part)},
                      {"discarded_norm", r.discarded_norm},
                      {"modulus", r.modulus},
                      {"retained_rank", r.retained_rank},
                      {"retained_count", r.retained_count},
                      {"discarded_count", r.discarded_count},
                      {"constant", r.constant},
                      {"norm_exact", r.norm_exact}});
    }
    out << json{{"p", report.p}, {"max_constant", report.max_constant}, {"rows", rows}}.dump(2) << '\n';
  } else {
    write_pipeline_csv(out, report);
  }
  return result;
}

RunResult run_jn(const ExperimentConfig& config, std::ostream& out) {
  RunResult result;
  const bool as_json = want_json(config);
  const std::string family_name = config.family.empty() ? "martingale" : config.family;
  json forests = json::array();
  if (!as_json) out << "trial,k,mass,bound,ok\n";

  for (std::size_t t = 0; t < config.trials; ++t) {
    const std::uint64_t seed = config.seed + t;
    const Measure mu = make_trial_measure(config, seed);
    const CubeCollection collection = CubeCollection::non_leaf(mu.tree());
    if (collection.empty()) {
      if (!as_json) out << t << ",0,0,0,1\n";
      continue;
    }
    const MartingaleFamily family = [&] {
      if (family_name == "martingale") {
        return MartingaleFamily::from_symbol(trial_symbol(config, mu, seed), mu, collection);
      }
      if (family_name == "random") return MartingaleFamily::random(mu, collection, seed, 1.0, 1.5);
      if (family_name == "lacunary") return MartingaleFamily::lacunary(mu, collection);
      if (family_name == "zero") return MartingaleFamily::zero(mu, collection);
      throw std::invalid_argument("jn --family must be martingale, random, lacunary or zero");
    }();

    const StoppingForest forest = build_stopping_forest(family, mu.tree().root());
    const JnReport report = verify_jn_bounds(forest, family);
    const std::string tag = " in trial " + std::to_string(t);
    if (!report.ok_half) violation(result, "half-measure bound failed" + tag);
    if (!report.ok_pointwise) violation(result, "pointwise bound failed" + tag);
    if (!report.ok_tail) violation(result, "tail bound failed" + tag);

    json extra;
    try {
      const Jn2Report jn2 = jn2_doubling_bound(family);
      if (!jn2.ok) violation(result, "doubling bound failed" + tag);
      extra["gamma_mu"] = jn2.gamma_mu;
      extra["jn2_ok"] = jn2.ok;
      const Jn3Report jn3 = jn3_comparability(family, config.p);
      if (jn3.violation) violation(result, "weak side vanishes with positive L^p side" + tag);
      extra["jn3_ratio"] = jn3.ratio;
    } catch (const std::domain_error&) {
      extra["gamma_mu"] = 0.0;
    }

    if (as_json) {
      json f = json::parse(forest_json(forest));
      f["trial"] = t;
      f["seed"] = seed;
      f["checks"] = {{"half", report.ok_half}, {"pointwise", report.ok_pointwise}, {"tail", report.ok_tail}};
      f.update(extra);
      forests.push_back(std::move(f));
    } else {
      write_tail_csv(out, report, static_cast<int>(t));
    }
  }
  if (as_json) out << forests.dump(2) << '\n';
  return result;
}

RunResult run_admissibility(const ExperimentConfig& config, std::ostream& out) {
  RunResult result;
  const Measure mu = make_trial_measure(config, config.seed);
  const DyadicTree& tree = mu.tree();
  const double p = config.p;
  const std::string family_name = config.family.empty() ? "haar" : config.family;
  const std::vector<SimpleFunction> funcs = make_family(family_name, mu, p);
  const TestFamilySequence seq = TestFamilySequence::singletons(funcs, p, mu);

  std::vector<SimpleFunction> duals{SimpleFunction::indicator(tree, tree.root())};
  if (!tree.is_leaf(tree.root())) duals.push_back(SimpleFunction::indicator(tree, tree.children(tree.root())[1]));
  if (!funcs.empty()) duals.push_back(funcs.front());
  const PairingProfile pairings = pairing_profile(seq, duals);
  const std::vector<double> cesaro = cesaro_profile(funcs, p, mu);

  const GrowthFunction phi = GrowthFunction::lp(p);
  const GreedySelection left = greedy_disjoint_subsequence(seq, OverlapMode::left);
  const GreedySelection right = greedy_disjoint_subsequence(seq, OverlapMode::right);
  const TriangleCheck left_check = improved_triangle_check(left.selected, p, mu, phi);
  const TriangleCheck right_check = improved_triangle_check(right.selected, p, mu, phi);
  if (!left_check.ok || !right_check.ok) violation(result, "improved triangle bound failed");

  const SectorWitness sector = sector_witness(funcs, duals.front(), p, mu);
  if (!sector.floor_holds) violation(result, "Cesaro profile fell below the sector floor");

  if (want_json(config)) {
    json j;
    j["family"] = family_name;
    j["bound"] = seq.bound();
    j["cesaro"] = cesaro;
    j["greedy_left"] = json::parse(greedy_certificate_json(left, left_check));
    j["greedy_right"] = json::parse(greedy_certificate_json(right, right_check));
    j["sector"] = {{"r", sector.r}, {"floor", sector.floor}, {"non_admissible", sector.non_admissible}};
    if (p == 2.0) {
      const HilbertCheck h = hilbert_admissibility_check(seq);
      j["hilbert"] = {{"bound", h.bound}, {"consistent", h.consistent}, {"profiles", h.profiles}};
    }
    out << j.dump(2) << '\n';
  } else {
    write_profiles_csv(out, pairings, cesaro);
    out << "non_admissible,,," << (sector.non_admissible ? 1 : 0) << '\n';
    out << "triangle_ok,,," << (left_check.ok && right_check.ok ? 1 : 0) << '\n';
  }
  return result;
}

RunResult run_experiment(const ExperimentConfig& config, std::ostream& out) {
  if (config.command == "moduli") return run_moduli(config, out);
  if (config.command == "opnorm") return run_opnorm(config, out);
  if (config.command == "compactness") return run_compactness(config, out);
  if (config.command == "jn") return run_jn(config, out);
  if (config.command == "admissibility") return run_admissibility(config, out);
  throw std::invalid_argument("unknown command '" + config.command + "'");
}

std::string write_repro_bundle(const ExperimentConfig& config, const RunResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir.empty() ? "." : dir);
  const std::filesystem::path path =
      std::filesystem::path(dir.empty() ? "." : dir) /
      ("repro-" + config.command + "-" + std::to_string(config.seed) + ".json");
  json j;
  j["config"] = json::parse(config.to_json());
  j["seed"] = config.seed;
  j["violations"] = result.messages;
  std::ofstream(path) << j.dump(2) << '\n';
  return path.string();
}

}  // namespace paravmo
