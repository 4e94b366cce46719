#pragma once

#include <string>
#include <vector>

#include "dedalus/ast.hpp"
#include "dedalus/dedalus.hpp"

namespace dedalus {

/// Finite stand-in for the infinite time universe: timestamps 0..t_max.
struct TimeWindow {
  Timestamp t_max = 1;  // >= 1
};

/// time(s), tsucc(s,s+1), lt(s,t), neq(s,t) over 0..t_max.
/// lt/neq are the ASCII spellings of the infix < and != relations.
Instance time_instance(const TimeWindow& w);

/// Input encoding: every input fact replicated at all timestamps with its
/// node as location, plus all(x) per node, plus the time relations.
Instance decl_input(const DistributedInstance& h, const TimeWindow& w);

enum class TransformMode { Choice, Causal, CausalFinite };

struct TransformedProgram {
  TransformMode mode = TransformMode::Choice;
  std::vector<Rule> rules;  // construction order, duplicate-free
  Program program() const { return Program(rules); }
};

struct ReservedNameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Relation names the transformations introduce; programs may not use them.
bool is_reserved_relation(const std::string& name);

TransformedProgram transform_choice(const DedalusProgram& d);
TransformedProgram transform_causal(const DedalusProgram& d);
TransformedProgram transform_causfin(const DedalusProgram& d);
TransformedProgram transform(const DedalusProgram& d, TransformMode mode);

}  // namespace dedalus
