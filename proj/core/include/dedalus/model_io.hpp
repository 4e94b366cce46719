#pragma once

#include <stdexcept>
#include <string>

#include "dedalus/correspondence.hpp"
#include "dedalus/operational.hpp"

namespace dedalus {

struct ModelIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Canonical fact-list form shared by the machine artifacts: a sorted array
/// of [relation, arg...] entries, strings for symbols, numbers for
/// timestamps.
std::string facts_to_json(const Instance& i);
Instance facts_from_json(const std::string& text);

/// {"t_ground": N, "t_check": N, "facts": [...]}
std::string model_to_json(const ModelCandidate& m);
ModelCandidate model_from_json(const std::string& text);

std::string run_to_json(const RunPrefix& run);
std::string report_to_json(const Report& rep);

}  // namespace dedalus
