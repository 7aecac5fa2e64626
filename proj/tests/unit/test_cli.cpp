#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>

#include "paravmo/experiments.hpp"
#include "paravmo/generators.hpp"
#include "paravmo/norms.hpp"
#include "paravmo/oscillation.hpp"
#include "paravmo/serialization.hpp"
#include "support.hpp"

using namespace paravmo;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

std::string run_to_string(const ExperimentConfig& c, RunResult* result = nullptr) {
  std::ostringstream out;
  const RunResult r = run_experiment(c, out);
  if (result) *result = r;
  return out.str();
}

int cli(const std::string& args) {
  const int status = std::system((std::string(PARAVMO_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "paravmo-tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("generator specs") {
  const auto s = GeneratorSpec::parse(" vmo-decay( 0.25 ) ");
  CHECK(s.name == "vmo-decay");
  REQUIRE(s.args.size() == 1);
  CHECK(s.number(0, 1) == 0.25);
  CHECK(s.number(1, 7) == 7);
  CHECK(s.to_string() == "vmo-decay(0.25)");
  CHECK(GeneratorSpec::parse("lebesgue").args.empty());
  CHECK_THROWS_AS(GeneratorSpec::parse("doubling(0.1"), std::invalid_argument);
  CHECK_THROWS_AS(GeneratorSpec::parse("doubling)"), std::invalid_argument);
  CHECK_THROWS_AS(GeneratorSpec::parse("doubling(x)").number(0, 0), std::invalid_argument);
}

TEST_CASE("measure generators") {
  const auto t = oracle::unit_tree(6);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Measure mu = doubling_measure(t, 0.2, seed);
    CHECK(mu.total_mass() == Approx(1.0));
    CHECK(doubling_constant(mu, CubeCollection::non_leaf(*t)) >= 0.2 - 1e-12);
  }
  CHECK_THROWS_AS(doubling_measure(t, 0.6, 1), std::invalid_argument);
  const Measure pm = pointmass_measure(t, 4);
  std::size_t nonzero = 0;
  for (double w : pm.weights()) nonzero += w > 0;
  CHECK(nonzero == 4);
  CHECK(pm.total_mass() == Approx(1.0));
  CHECK_THROWS_AS(pointmass_measure(t, 0), std::invalid_argument);
  const Measure cm = cantor_measure(t, 0.25);
  CHECK(cm.mass(t->leaf_cube(0)) == Approx(std::pow(0.25, 6)));
  CHECK(doubling_constant(cm, CubeCollection::non_leaf(*t)) == Approx(0.25));
  CHECK_THROWS_AS(make_measure(GeneratorSpec::parse("nope"), t, 1), std::invalid_argument);
  // Root mass is the Lebesgue volume of the window.
  const auto big = std::make_shared<const DyadicTree>(2, -1, 2);
  CHECK(make_measure(GeneratorSpec::parse("cantor(0.3)"), big, 1).total_mass() == Approx(4.0));
}

TEST_CASE("symbol generators") {
  const auto t = oracle::unit_tree(5);
  const Measure leb = Measure::lebesgue(t);
  const SimpleFunction h = make_symbol(GeneratorSpec::parse("haar(2)"), leb, 1);
  const CubeId q = leftmost_cube(*t, 2);
  CHECK(bmo_norm(h, CubeCollection::all(*t), 2, leb) == Approx(1.0));
  CHECK(oracle::lp(h, leb, 1) == Approx(leb.mass(q)));
  CHECK(make_symbol(GeneratorSpec::parse("random"), leb, 3) == make_symbol(GeneratorSpec::parse("random(3)"), leb, 9));
  CHECK(make_symbol(GeneratorSpec::parse("constant(2)"), leb, 1) == SimpleFunction::constant(32, 2.0));
  CHECK_THROWS_AS(make_symbol(GeneratorSpec::parse("haar(5)"), leb, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_symbol(GeneratorSpec::parse("zzz"), leb, 1), std::invalid_argument);
  // vmo-decay: sum of 2^(-alpha k) Haar terms, oscillation at level k equals the tail sum.
  const SimpleFunction v = vmo_decay_symbol(*t, 0.5);
  for (int k = 0; k < 5; ++k) {
    double tail = 0.0;
    for (int j = k; j < 5; ++j) tail += std::exp2(-j);
    CHECK(osc(v, leftmost_cube(*t, k), 2, leb) == Approx(std::sqrt(tail)));
  }
  const SimpleFunction bnv = bmo_not_vmo_symbol(*t);
  for (int k = 1; k < 5; ++k) CHECK(osc(bnv, leftmost_cube(*t, k), 2, leb) >= 1.0 - 1e-12);
}

TEST_CASE("families") {
  const auto t = oracle::unit_tree(5);
  const Measure leb = Measure::lebesgue(t);
  for (const char* name : {"haar", "light", "disjoint", "constant"}) {
    for (const SimpleFunction& f : make_family(name, leb, 2)) CHECK(lp_norm(f, 2, leb) == Approx(1.0));
  }
  CHECK(make_family("constant", leb, 2).size() == 6);
  CHECK_THROWS_AS(make_family("bogus", leb, 2), std::invalid_argument);
}

TEST_CASE("instance serialization") {
  const auto t = std::make_shared<const DyadicTree>(2, -1, 1, std::vector<DyadicRational>{DyadicRational(-2, 0), DyadicRational(4, 0)});
  const Measure mu = oracle::random_measure(t, 4, 0.2);
  const SimpleFunction f = oracle::random_function(t->leaf_count(), 5, true);
  const Instance back = parse_instance(instance_json(mu, &f));
  REQUIRE(back.values.has_value());
  CHECK(*back.values == f);
  CHECK(back.measure.tree().coarsest_level() == -1);
  CHECK(back.measure.tree().origin()[0] == DyadicRational(-2, 0));
  for (std::size_t i = 0; i < mu.leaf_count(); ++i) CHECK(back.measure.weight(i) == mu.weight(i));

  const Instance leb = parse_instance(std::string(R"({"dimension": 1, "levels": [0, 2], "values": [1, [0, 2], 3, 4]})"));
  CHECK(leb.measure.weight(0) == 0.25);
  CHECK((*leb.values)[1] == Complex(0, 2));
  try {
    parse_instance(std::string(R"({"dimension": 1, "levels": [0, 2], "weights": [1, 2]})"));
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("field 'weights'") != std::string::npos);
  }
  try {
    parse_instance(std::string(R"({"dimension": 1, "levels": [0, 2)"));
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("malformed JSON at byte") != std::string::npos);
  }
  const auto path = scratch("instance.json");
  std::ofstream(path) << instance_json(mu, &f);
  CHECK(load_instance(path.string()).values == f);
  CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), std::invalid_argument);

  const auto s = nlohmann::json::parse(partition_json(partition_reduction(CubeCollection::all(*t), mu, 2.0)));
  CHECK(s.is_object());
}

TEST_CASE("experiment runners") {
  ExperimentConfig c;
  c.depth = 5;
  SUBCASE("moduli are deterministic and zero for constants") {
    c.command = "moduli";
    c.symbol = "random";
    c.seed = 17;
    CHECK(run_to_string(c) == run_to_string(c));
    c.symbol = "constant(3)";
    std::istringstream rows(run_to_string(c));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) CHECK(line.substr(line.find(',')) == ",0,0,0");
    c.symbol = "vmo-decay(0.5)";
    RunResult r;
    run_to_string(c, &r);
    CHECK(r.violations == 0);
  }
  SUBCASE("opnorm of a single Haar symbol") {
    c.command = "opnorm";
    c.symbol = "haar(0)";
    c.depth = 4;
    std::istringstream rows(run_to_string(c));
    std::string header, line;
    std::getline(rows, header);
    std::getline(rows, line);
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    REQUIRE(cells.size() == 9);
    // Only the root term is present, with norm ||h||_2 * ||1||_2 = 1.
    CHECK(std::stod(cells[3]) == Approx(1.0));
    CHECK(cells[8] == "1");
    c.symbol = "constant(1)";
    const std::string zero = run_to_string(c);
    CHECK(zero.find(",0,0,0,0,") != std::string::npos);
  }
  SUBCASE("opnorm trials satisfy necessity") {
    c.command = "opnorm";
    c.trials = 50;
    c.measure = "doubling(0.1)";
    RunResult r;
    run_to_string(c, &r);
    CHECK(r.violations == 0);
  }
  SUBCASE("compactness, jn and admissibility run clean") {
    for (const char* cmd : {"compactness", "jn", "admissibility"}) {
      c.command = cmd;
      c.trials = 3;
      c.family = std::string(cmd) == "admissibility" ? "haar" : "";
      RunResult r;
      const std::string out = run_to_string(c, &r);
      CHECK_MESSAGE(r.violations == 0, cmd);
      CHECK_FALSE(out.empty());
    }
    c.command = "jn";
    c.family = "lacunary";
    c.format = "json";
    c.depth = 8;
    const auto j = nlohmann::json::parse(run_to_string(c));
    CHECK_FALSE(j.empty());
  }
  SUBCASE("bad configs") {
    c.command = "moduli";
    c.thresholds = {4, 2};
    CHECK_THROWS_AS(run_to_string(c), std::invalid_argument);
    c.thresholds = {};
    c.command = "nope";
    CHECK_THROWS_AS(run_to_string(c), std::invalid_argument);
  }
  SUBCASE("repro bundles") {
    c.command = "moduli";
    c.seed = 99;
    RunResult r;
    r.violations = 1;
    r.messages = {"synthetic"};
    const fs::path dir = scratch("repro");
    fs::create_directories(dir);
    const std::string path = write_repro_bundle(c, r, dir.string());
    CHECK(fs::path(path).filename() == "repro-moduli-99.json");
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    CHECK(j.dump().find("synthetic") != std::string::npos);
  }
}

TEST_CASE("command line exit codes") {
  CHECK(cli("moduli --depth 4") == 0);
  CHECK(cli("opnorm --depth 4 --trials 3 --measure 'doubling(0.2)'") == 0);
  CHECK(cli("jn --depth 6 --family lacunary --format json") == 0);
  CHECK(cli("admissibility --depth 5 --family constant") == 0);
  CHECK(cli("moduli --depth") == 2);
  CHECK(cli("moduli --thresholds 4,2") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("moduli --symbol 'nope(1)'") == 2);
  CHECK(cli("jn --measure 'pointmass(1)' --depth 4") != 1);

  const fs::path out = scratch("cli-out.csv");
  fs::remove(out);
  CHECK(cli("moduli --depth 4 --seed 3 --out " + out.string()) == 0);
  CHECK(fs::exists(out));
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "M,heavy,light,distant");
}
