#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace dedalus {

using Timestamp = std::uint64_t;

/// Node identifiers are opaque symbols; the network decides which symbols
/// name nodes.
using NodeId = std::string;

/// An atomic data value: an opaque symbol or a natural-number timestamp.
class Value {
 public:
  static Value sym(std::string s) { return Value(std::move(s)); }
  static Value ts(Timestamp t) { return Value(t); }

  bool is_symbol() const { return std::holds_alternative<std::string>(v_); }
  bool is_timestamp() const { return std::holds_alternative<Timestamp>(v_); }

  const std::string& symbol() const { return std::get<std::string>(v_); }
  Timestamp timestamp() const { return std::get<Timestamp>(v_); }

  std::string to_string() const;

  auto operator<=>(const Value&) const = default;

 private:
  explicit Value(std::string s) : v_(std::move(s)) {}
  explicit Value(Timestamp t) : v_(t) {}
  std::variant<std::string, Timestamp> v_;
};

struct Variable {
  std::string name;
  auto operator<=>(const Variable&) const = default;
};

/// Rule argument: a data value or a variable.
using Term = std::variant<Value, Variable>;

struct Fact {
  std::string pred;
  std::vector<Value> args;
  auto operator<=>(const Fact&) const = default;
  std::string to_string() const;
};

struct Atom {
  std::string pred;
  std::vector<Term> args;

  bool is_ground() const;
  bool is_constant_free() const;
  void collect_vars(std::set<std::string>& out) const;

  auto operator<=>(const Atom&) const = default;
  std::string to_string() const;
};

Atom to_atom(const Fact& f);
Fact to_fact(const Atom& a);  // requires a.is_ground()

/// Datalog-with-negation rule: head, positive body atoms, negative body
/// atoms. Safety: every variable occurs in some positive body atom.
struct Rule {
  Atom head;
  std::vector<Atom> pos;
  std::vector<Atom> neg;

  bool is_positive() const { return neg.empty(); }
  bool is_ground() const;
  bool is_safe() const;
  std::set<std::string> vars() const;

  Rule normalized() const;  // pos/neg sorted and deduplicated

  auto operator<=>(const Rule&) const = default;
  std::string to_string() const;
};

/// Relation name -> arity. A relation occurs at most once.
using Schema = std::map<std::string, std::size_t>;

/// Set of facts, indexed by predicate.
class Instance {
 public:
  Instance() = default;

  bool insert(const Fact& f);
  bool insert(Fact&& f);
  void insert_all(const Instance& other);
  bool contains(const Fact& f) const;
  bool erase(const Fact& f);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  const std::set<std::vector<Value>>& tuples(const std::string& pred) const;
  std::vector<Fact> facts() const;  // sorted
  std::vector<std::string> predicates() const;

  bool subset_of(const Instance& other) const;
  Instance restricted_to(const std::set<std::string>& preds) const;
  Instance difference(const Instance& other) const;
  std::set<Value> adom() const;

  bool operator==(const Instance& other) const { return by_pred_ == other.by_pred_; }

  template <typename F>
  void for_each(F&& fn) const {
    for (const auto& [pred, tuples] : by_pred_)
      for (const auto& t : tuples) fn(Fact{pred, t});
  }

 private:
  std::map<std::string, std::set<std::vector<Value>>> by_pred_;
  std::size_t size_ = 0;
};

class Program {
 public:
  Program() = default;
  explicit Program(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

  /// Smallest schema the program is over. Throws on arity conflicts.
  Schema sch() const;
  std::set<std::string> idb() const;  // head relations
  std::set<std::string> edb() const;  // sch minus idb
  std::set<Value> constants() const;

 private:
  std::vector<Rule> rules_;  // sorted, unique
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every fact whose predicate the program mentions must match its arity.
void check_schema_compatible(const Program& p, const Instance& inst);

}  // namespace dedalus
