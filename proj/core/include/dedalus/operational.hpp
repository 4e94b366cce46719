#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dedalus/ast.hpp"
#include "dedalus/dedalus.hpp"

namespace dedalus {

/// A buffered message: the fact plus the ordinal of the sending transition.
/// The tag separates multiple in-flight instances of the same fact.
struct TaggedMessage {
  std::size_t tag = 0;
  Fact fact;  // over idb(D), original arity (addressee stripped)
  auto operator<=>(const TaggedMessage&) const = default;
};

struct Configuration {
  std::map<NodeId, Instance> state;                  // over sch(D)
  std::map<NodeId, std::set<TaggedMessage>> buffer;  // per addressee
  bool operator==(const Configuration&) const = default;
};

struct TransitionRecord {
  Configuration source;
  NodeId active;
  std::set<TaggedMessage> delivered;  // subset of source.buffer[active]
  std::size_t tag = 0;                // ordinal of this transition
  Configuration target;
  Instance deductive;  // D_i: deductive closure of state + delivered facts
  std::map<NodeId, std::set<TaggedMessage>> sent;  // addressee -> messages
};

struct RunPrefix {
  DedalusProgram program;
  Subprograms subs;
  DistributedInstance input;
  std::vector<TransitionRecord> transitions;
};

Configuration start_configuration(const DedalusProgram& d, const DistributedInstance& h);

struct InvalidDelivery : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One transition of node x delivering m with send-tag i. Messages addressed
/// outside the network are dropped; self-addressed sends go back into x's
/// own buffer.
TransitionRecord step(const Subprograms& subs, const DistributedInstance& h,
                      const Configuration& cnf, const NodeId& x,
                      const std::set<TaggedMessage>& m, std::size_t i);

enum class SchedulerPolicy { RoundRobin, SeededRandom, SingleDelivery };

struct Scheduler {
  SchedulerPolicy policy = SchedulerPolicy::RoundRobin;
  std::uint64_t seed = 0;
  std::size_t max_delay = 1;  // in activations of the addressee, >= 1
};

/// n transitions with cyclic node activation. RoundRobin delivers the whole
/// buffer of the active node; SeededRandom delivers each buffered message
/// with probability 1/2, forced once it has waited max_delay activations;
/// SingleDelivery delivers exactly one message (seeded pick among those with
/// the smallest tag) whenever the buffer is nonempty.
RunPrefix simulate(const DedalusProgram& d, const DistributedInstance& h,
                   const Scheduler& sched, std::size_t n);

struct ClockIndex {
  std::vector<Timestamp> loc;  // transition ordinal -> local timestamp
  std::map<std::pair<NodeId, Timestamp>, std::size_t> glob;
};

ClockIndex clocks(const RunPrefix& run);

struct ArrivalMap {
  // (send ordinal, addressee, fact) -> delivery ordinal; always > send ordinal
  std::map<std::tuple<std::size_t, NodeId, Fact>, std::size_t> at;
  // messages still buffered when the prefix ends
  std::vector<std::tuple<std::size_t, NodeId, Fact>> pending;
};

ArrivalMap arrival(const RunPrefix& run);

/// Union over transitions of D_i lifted by (active node, local timestamp).
Instance trace(const RunPrefix& run);

using NodeStep = std::pair<NodeId, Timestamp>;

enum EdgeLabel : unsigned { kLocalEdge = 1, kMessageEdge = 2, kTransitiveEdge = 4 };

/// Smallest relation containing local succession and message delivery edges
/// and closed under transitivity, over the steps the run performed.
struct HappensBefore {
  std::map<std::pair<NodeStep, NodeStep>, unsigned> edges;  // label bitmask
  bool related(const NodeStep& a, const NodeStep& b) const {
    return edges.count({a, b}) != 0;
  }
};

HappensBefore happens_before(const RunPrefix& run);

}  // namespace dedalus
