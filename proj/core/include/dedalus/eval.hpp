#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dedalus/ast.hpp"

namespace dedalus {

using Valuation = std::map<std::string, Value>;

/// Calls fn once per valuation of r's variables that satisfies the body on I
/// (positive atoms matched, negative atoms absent). fn may return false to
/// stop enumeration early.
void for_each_satisfying_valuation(const Rule& r, const Instance& I,
                                   const std::function<bool(const Valuation&)>& fn);

Fact apply_valuation(const Atom& a, const Valuation& v);

/// T_P(J): J plus every head derivable by one satisfying valuation.
Instance immediate_consequence(const Program& p, const Instance& j);

/// Derived heads only; the input is not included in the result.
Instance one_step(const Program& p, const Instance& i);

struct NotSemiPositive : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least fixpoint of T_P containing I. P must use negation only on edb(P).
Instance semi_positive_fixpoint(const Program& p, const Instance& i);

/// idb relation -> stratum, numbered contiguously from 1.
using StratumMap = std::map<std::string, int>;

struct NotStratifiable : std::runtime_error {
  explicit NotStratifiable(std::vector<std::string> c);
  std::vector<std::string> cycle;  // relations on a negative dependency cycle
};

/// Deterministic syntactic stratification: stratum = longest chain of
/// negative edges into the relation's component of the condensed dependency
/// graph, plus one. Throws NotStratifiable with a witness cycle.
StratumMap stratify(const Program& p);

/// Evaluates stratum by stratum. Result includes I. Throws NotStratifiable.
Instance stratified_eval(const Program& p, const Instance& i);

/// Ground-rule container. Keeps the source program and grounding base so the
/// reduct and stability check can refer back to them.
struct GroundProgram {
  std::vector<Rule> rules;  // all ground
  Program source;
  Instance base;
};

/// All ground rules of P over adom(I) union P's constants.
GroundProgram ground(const Program& p, const Instance& i);

/// Drops rules whose negative body meets M; strips negation from the rest.
std::vector<Rule> reduct(const GroundProgram& g, const Instance& m);

struct StableVerdict {
  bool stable = false;
  Instance missing;  // in M, not reproduced by the reduct fixpoint
  Instance extra;    // reproduced, not in M
};

/// M is stable iff it equals the minimal model of reduct(ground(P,I), M) on
/// input I.
StableVerdict is_stable_model(const Program& p, const Instance& i, const Instance& m);

/// Fixpoint of P on I where negative atoms are tested against the fixed set
/// M rather than the growing result. Agrees with evaluating the reduct of
/// the full grounding w.r.t. M, without materializing it.
Instance fixpoint_with_fixed_negation(const Program& p, const Instance& i,
                                      const Instance& m);

}  // namespace dedalus
