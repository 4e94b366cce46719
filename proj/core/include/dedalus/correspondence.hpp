#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dedalus/ast.hpp"
#include "dedalus/operational.hpp"
#include "dedalus/transform.hpp"

namespace dedalus {

/// t_ground: horizon of the finite grounding universe. t_check <= t_ground:
/// sub-horizon on which every derivation is closed, so model and trace
/// equality can be asserted fact-for-fact.
struct Window {
  Timestamp t_ground = 0;
  Timestamp t_check = 0;
};

enum class ModelOrigin { FromRun, External };

struct ModelCandidate {
  Instance facts;  // over the transformed schema, timestamps <= t_ground
  Window window;
  ModelOrigin origin = ModelOrigin::External;
};

struct WindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IllFormedModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Builds the stable-model candidate of a run: decl(H) plus, per transition,
/// the causality, finiteness, deductive and sending slices, truncated to the
/// window. Messages still pending when the prefix ends shrink the window so
/// that no open derivation lands inside it.
ModelCandidate run_to_model(const RunPrefix& run);

struct Verdict {
  bool accepted = false;
  Instance missing;  // in-window facts of M the reduct fixpoint cannot derive
  Instance extra;    // in-window derived facts absent from M
};

/// Compares M against the fixpoint of P's reduct with respect to M on input
/// I, restricted to facts whose timestamps all lie within t_check.
Verdict windowed_stable_check(const TransformedProgram& p, const Instance& i,
                              const ModelCandidate& m);

/// Throws IllFormedModel unless location positions hold symbols and
/// timestamp positions hold timestamps <= t_ground, per relation signature.
void check_well_formed(const ModelCandidate& m);

struct CycleDetected : std::runtime_error {
  CycleDetected(std::string msg, std::vector<NodeStep> w);
  std::vector<NodeStep> witness;
};

struct NotTransitive : std::runtime_error {
  NotTransitive(std::string msg, std::vector<NodeStep> w);
  std::vector<NodeStep> witness;  // a, b, c with a->b, b->c but not a->c
};

/// Reads the order off M's before-facts and labels each edge by the ground
/// rule forms able to derive it. Validates strictness and transitivity.
HappensBefore extract_model_order(const ModelCandidate& m);

struct InvalidTransition : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rebuilds a run from M: deterministic linear extension of the model order
/// (smallest (timestamp, node) first), configurations from the edb facts and
/// the active inductive ground-rule heads, deliveries from the chosen-facts.
/// Each transition is produced by operational::step and cross-checked
/// against the model-defined state within the window.
RunPrefix model_to_run(const ModelCandidate& m, const DedalusProgram& d,
                       const DistributedInstance& h);

struct Report {
  Window window{};
  bool simulated = false;
  bool model_built = false;
  Verdict stability;
  bool run_rebuilt = false;
  bool model_trace_equal = false;      // M restricted to LT(sch(D)), in-window
  bool roundtrip_trace_equal = false;  // trace of rebuilt run, in-window
  std::string error;                   // first stage failure, if any
  bool pass = false;
};

/// Full correspondence pipeline: simulate, build the model, verify windowed
/// stability
/// against the causality-finiteness transformation, rebuild the run, compare
/// in-window traces.
Report verify_theorem(const DedalusProgram& d, const DistributedInstance& h,
                      const Scheduler& sched, std::size_t n);

/// LT-facts of I whose timestamp argument is <= t_check, over sch(D).
Instance restrict_trace_to_window(const Instance& trace_facts, const Window& w);

}  // namespace dedalus
