#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "paravmo/measure.hpp"

namespace paravmo {

struct ExperimentConfig {
  std::string command;
  int depth = 6;
  int dim = 1;
  int coarsest = 0;  // root side 2^-coarsest with the origin at the lower corner
  double p = 2.0;
  std::string measure = "lebesgue";
  std::string symbol = "random";
  std::uint64_t seed = 1;
  std::vector<double> thresholds;  // empty means 2^1 .. 2^8
  std::size_t trials = 1;
  std::string family;  // admissibility: haar|light|disjoint|constant; jn: martingale|random|lacunary|zero
  std::string format = "csv";
  std::string out;

  std::vector<double> threshold_grid() const;
  std::string to_json() const;
};

/// Trial t runs with seed + t.
TreePtr make_tree(const ExperimentConfig& config);
Measure make_trial_measure(const ExperimentConfig& config, std::uint64_t seed);

struct RunResult {
  std::size_t violations = 0;
  std::vector<std::string> messages;
};

/// Each runner writes its table (or JSON document) to `out` and counts
/// violated inequalities. Malformed configs throw std::invalid_argument.
RunResult run_moduli(const ExperimentConfig& config, std::ostream& out);
RunResult run_opnorm(const ExperimentConfig& config, std::ostream& out);
RunResult run_compactness(const ExperimentConfig& config, std::ostream& out);
RunResult run_jn(const ExperimentConfig& config, std::ostream& out);
RunResult run_admissibility(const ExperimentConfig& config, std::ostream& out);

RunResult run_experiment(const ExperimentConfig& config, std::ostream& out);

/// Writes config and violation messages to <dir>/repro-<command>-<seed>.json
/// and returns the path.
std::string write_repro_bundle(const ExperimentConfig& config, const RunResult& result, const std::string& dir);

}  // namespace paravmo
