#pragma once

#include <istream>
#include <optional>
#include <string>

#include "paravmo/measure.hpp"
#include "paravmo/oscillation.hpp"
#include "paravmo/paraproduct.hpp"
#include "paravmo/simple_function.hpp"

namespace paravmo {

/// A tree with its measure and an optional leaf function, as read from
///   {"dimension": d, "levels": [coarsest, finest], "origin": [...],
///    "weights": [...], "values": [...]}
/// Weights default to Lebesgue. Values are numbers or [re, im] pairs.
struct Instance {
  Measure measure;
  std::optional<SimpleFunction> values;
};

/// Throws std::invalid_argument naming the offending field, or the byte
/// offset for malformed JSON.
Instance parse_instance(std::istream& in);
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);

std::string instance_json(const Measure& mu, const SimpleFunction* values = nullptr);
std::string partition_json(const ReductionPartition& partition);
std::string spectrum_json(const SingularSpectrum& spectrum);

}  // namespace paravmo
