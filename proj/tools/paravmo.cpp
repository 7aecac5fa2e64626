#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "paravmo/experiments.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

void add_common(CLI::App& cmd, paravmo::ExperimentConfig& c) {
  cmd.add_option("--depth", c.depth, "Refinement depth below the root")->capture_default_str();
  cmd.add_option("--dim", c.dim, "Dimension d")->capture_default_str();
  cmd.add_option("--coarsest", c.coarsest, "Root level; the root has side 2^-coarsest")->capture_default_str();
  cmd.add_option("--p", c.p, "Exponent p >= 1")->capture_default_str();
  cmd.add_option("--measure", c.measure, "lebesgue | doubling(g) | pointmass(k) | cantor(t) | custom-json(path)")
      ->capture_default_str();
  cmd.add_option("--symbol", c.symbol,
                 "haar-lacunary(r) | vmo-decay(a) | bmo-not-vmo | random[(seed)] | constant(c) | haar(k) | "
                 "custom-json(path)")
      ->capture_default_str();
  cmd.add_option("--seed", c.seed, "Base seed; trial t uses seed + t")->capture_default_str();
  cmd.add_option("--thresholds", c.thresholds, "Comma-separated increasing M values")->delimiter(',');
  cmd.add_option("--trials", c.trials, "Number of seeded trials")->capture_default_str();
  cmd.add_option("--family", c.family, "admissibility: haar|light|disjoint|constant; jn: martingale|random|lacunary|zero");
  cmd.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd.add_option("--out", c.out, "Output file; defaults to $PARAVMO_OUT_DIR/<command>.<format> or stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic paraproduct, BMO/VMO and John-Nirenberg experiments"};
  app.require_subcommand(1);
  paravmo::ExperimentConfig config;
  const std::pair<const char*, const char*> commands[] = {
      {"moduli", "Heavy/light/distant VMO moduli per threshold"},
      {"opnorm", "Operator norms, BMO norms and the testing inequality over seeded trials"},
      {"compactness", "Reduction pipeline: discarded-part norms against VMO moduli"},
      {"jn", "Stopping forests and John-Nirenberg bounds"},
      {"admissibility", "Pairing and Cesaro profiles, greedy disjointification"},
  };
  for (const auto& [name, help] : commands) add_common(*app.add_subcommand(name, help), config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  config.command = app.get_subcommands().front()->get_name();

  std::string out_path = config.out;
  std::string bundle_dir = ".";
  if (const char* dir = std::getenv("PARAVMO_OUT_DIR"); dir && *dir) {
    bundle_dir = dir;
    if (out_path.empty()) out_path = (std::filesystem::path(dir) / (config.command + "." + config.format)).string();
  }
  if (!out_path.empty() && std::filesystem::path(out_path).has_parent_path()) {
    bundle_dir = std::filesystem::path(out_path).parent_path().string();
  }

  paravmo::RunResult result;
  try {
    if (out_path.empty()) {
      result = paravmo::run_experiment(config, std::cout);
    } else {
      if (std::filesystem::path(out_path).has_parent_path()) {
        std::filesystem::create_directories(std::filesystem::path(out_path).parent_path());
      }
      std::ofstream file(out_path);
      if (!file) throw std::invalid_argument("cannot write " + out_path);
      result = paravmo::run_experiment(config, file);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  if (result.violations > 0) {
    for (const std::string& m : result.messages) std::cerr << "violation: " << m << '\n';
    std::cerr << "repro bundle: " << paravmo::write_repro_bundle(config, result, bundle_dir) << '\n';
    return kViolation;
  }
  return kOk;
}
