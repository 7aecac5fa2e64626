#include "paravmo/serialization.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace paravmo {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw std::invalid_argument("field '" + field + "': " + what);
}

const json& require(const json& j, const char* field) {
  if (!j.contains(field)) field_error(field, "missing");
  return j.at(field);
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) field_error(field, "expected an integer");
  return j.get<int>();
}

Complex as_value(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  field_error(field, "expected a number or an [re, im] pair");
}

Instance from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("instance: expected a JSON object");
  const int dimension = j.contains("dimension") ? as_int(j.at("dimension"), "dimension") : 1;
  const json& levels = require(j, "levels");
  if (!levels.is_array() || levels.size() != 2) field_error("levels", "expected [coarsest, finest]");
  const int coarsest = as_int(levels[0], "levels[0]");
  const int finest = as_int(levels[1], "levels[1]");

  std::vector<DyadicRational> origin;
  if (j.contains("origin")) {
    const json& o = j.at("origin");
    if (!o.is_array()) field_error("origin", "expected an array");
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (!o[i].is_number()) field_error("origin[" + std::to_string(i) + "]", "expected a number");
      try {
        origin.push_back(DyadicRational::from_double(o[i].get<double>()));
      } catch (const std::exception& e) {
        field_error("origin[" + std::to_string(i) + "]", e.what());
      }
    }
  }

  TreePtr tree;
  try {
    tree = std::make_shared<const DyadicTree>(dimension, coarsest, finest, origin);
  } catch (const std::invalid_argument& e) {
    field_error("levels", e.what());
  }

  std::optional<Measure> mu;
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    if (!w.is_array()) field_error("weights", "expected an array");
    std::vector<double> weights;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!w[i].is_number()) field_error("weights[" + std::to_string(i) + "]", "expected a number");
      weights.push_back(w[i].get<double>());
    }
    try {
      mu.emplace(tree, std::move(weights));
    } catch (const std::invalid_argument& e) {
      field_error("weights", e.what());
    }
  } else {
    mu.emplace(Measure::lebesgue(tree));
  }

  Instance out{*mu, std::nullopt};
  if (j.contains("values")) {
    const json& v = j.at("values");
    if (!v.is_array()) field_error("values", "expected an array");
    if (v.size() != tree->leaf_count()) {
      field_error("values", "expected " + std::to_string(tree->leaf_count()) + " entries");
    }
    SimpleFunction f(tree->leaf_count());
    for (std::size_t i = 0; i < v.size(); ++i) f[i] = as_value(v[i], "values[" + std::to_string(i) + "]");
    out.values = std::move(f);
  }
  return out;
}

json parse_text(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON at byte " + std::to_string(e.byte));
  }
}

}  // namespace

Instance parse_instance(std::istream& in) { return from_json(parse_text(in)); }

Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return parse_instance(in);
}

std::string instance_json(const Measure& mu, const SimpleFunction* values) {
  const DyadicTree& tree = mu.tree();
  json j;
  j["dimension"] = tree.dimension();
  j["levels"] = {tree.coarsest_level(), tree.finest_level()};
  j["origin"] = json::array();
  for (const DyadicRational& o : tree.origin()) j["origin"].push_back(o.to_double());
  j["weights"] = std::vector<double>(mu.weights().begin(), mu.weights().end());
  if (values) {
    bool real = true;
    for (Complex z : values->values()) real = real && z.imag() == 0.0;
    j["values"] = json::array();
    for (Complex z : values->values()) {
      if (real) {
        j["values"].push_back(z.real());
      } else {
        j["values"].push_back({z.real(), z.imag()});
      }
    }
  }
  return j.dump();
}

std::string partition_json(const ReductionPartition& partition) {
  auto ids = [](const CubeCollection& c) {
    std::vector<std::uint32_t> out;
    for (CubeId q : c) out.push_back(q.value);
    return out;
  };
  json j;
  j["distant"] = ids(partition.distant);
  j["inner"] = ids(partition.inner);
  j["outer"] = ids(partition.outer);
  j["outer_chains"] = json::array();
  for (const auto& [minimal, chain] : partition.outer_chains) {
    j["outer_chains"].push_back({{"minimal", minimal.value}, {"chain", ids(chain)}});
  }
  return j.dump();
}

std::string spectrum_json(const SingularSpectrum& spectrum) {
  json j;
  j["values"] = spectrum.values;
  j["complete"] = spectrum.complete;
  j["norm"] = spectrum.norm();
  j["numerical_rank"] = spectrum.numerical_rank();
  return j.dump();
}

}  // namespace paravmo
