#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dedalus/ast.hpp"
#include "dedalus/datalog_text.hpp"

namespace dedalus {

enum class RuleKind { Deductive, Inductive, Async };

struct DedalusRule {
  RuleKind kind = RuleKind::Deductive;
  std::string addressee;  // variable name, Async only
  Rule rule;              // head carries the original (unextended) arity

  auto operator<=>(const DedalusRule&) const = default;
  std::string to_string() const;
};

/// Validated Dedalus program. Rules are safe, constant-free, have at least
/// one positive body atom, async addressees occur in the positive body, and
/// the deductive subset is syntactically stratifiable.
class DedalusProgram {
 public:
  DedalusProgram() = default;

  /// Validates; throws ParseError (with rule positions when available).
  static DedalusProgram validate(std::vector<DedalusRule> rules,
                                 const std::vector<std::pair<int, int>>& positions = {});

  const std::vector<DedalusRule>& rules() const { return rules_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  Schema sch() const;
  std::set<std::string> idb() const;
  std::set<std::string> edb() const;

 private:
  std::vector<DedalusRule> rules_;
  std::vector<std::string> warnings_;
};

DedalusProgram parse_dedalus(const std::string& text);
std::string pretty(const DedalusProgram& d);

struct Subprograms {
  Program deductive;
  Program inductive;  // head annotation dropped
  Program async;      // heads rewritten with the addressee prepended
};

Subprograms split_subprograms(const DedalusProgram& d);

struct Network {
  std::set<NodeId> nodes;  // nonempty
};

struct DistributedInstance {
  Network network;
  std::map<NodeId, Instance> facts;  // one entry per node, over edb(D)
};

struct InstanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses the JSON instance document
///   {"nodes": ["x","y"], "facts": {"x": [["r","a"],...], ...}}
/// against D's schema. Strings become symbols, numbers become timestamps.
DistributedInstance parse_instance(const std::string& json_text, const DedalusProgram& d);

std::string instance_to_json(const DistributedInstance& h);

}  // namespace dedalus
