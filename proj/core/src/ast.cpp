#include "dedalus/ast.hpp"

#include <algorithm>
#include <sstream>

namespace dedalus {

std::string Value::to_string() const {
  if (is_timestamp()) return std::to_string(timestamp());
  return symbol();
}

std::string Fact::to_string() const {
  std::ostringstream os;
  os << pred << '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ',';
    os << args[i].to_string();
  }
  os << ')';
  return os.str();
}

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) {
    return std::holds_alternative<Value>(t);
  });
}

bool Atom::is_constant_free() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) {
    return std::holds_alternative<Variable>(t);
  });
}

void Atom::collect_vars(std::set<std::string>& out) const {
  for (const Term& t : args)
    if (const auto* v = std::get_if<Variable>(&t)) out.insert(v->name);
}

std::string Atom::to_string() const {
  std::ostringstream os;
  os << pred << '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ',';
    if (const auto* v = std::get_if<Variable>(&args[i]))
      os << v->name;
    else
      os << std::get<Value>(args[i]).to_string();
  }
  os << ')';
  return os.str();
}

Atom to_atom(const Fact& f) {
  Atom a{f.pred, {}};
  a.args.reserve(f.args.size());
  for (const Value& v : f.args) a.args.emplace_back(v);
  return a;
}

Fact to_fact(const Atom& a) {
  Fact f{a.pred, {}};
  f.args.reserve(a.args.size());
  for (const Term& t : a.args) f.args.push_back(std::get<Value>(t));
  return f;
}

bool Rule::is_ground() const {
  if (!head.is_ground()) return false;
  for (const Atom& a : pos)
    if (!a.is_ground()) return false;
  for (const Atom& a : neg)
    if (!a.is_ground()) return false;
  return true;
}

std::set<std::string> Rule::vars() const {
  std::set<std::string> out;
  head.collect_vars(out);
  for (const Atom& a : pos) a.collect_vars(out);
  for (const Atom& a : neg) a.collect_vars(out);
  return out;
}

bool Rule::is_safe() const {
  std::set<std::string> pos_vars;
  for (const Atom& a : pos) a.collect_vars(pos_vars);
  for (const std::string& v : vars())
    if (!pos_vars.count(v)) return false;
  return true;
}

Rule Rule::normalized() const {
  Rule r = *this;
  std::sort(r.pos.begin(), r.pos.end());
  r.pos.erase(std::unique(r.pos.begin(), r.pos.end()), r.pos.end());
  std::sort(r.neg.begin(), r.neg.end());
  r.neg.erase(std::unique(r.neg.begin(), r.neg.end()), r.neg.end());
  return r;
}

std::string Rule::to_string() const {
  std::ostringstream os;
  os << head.to_string();
  if (!pos.empty() || !neg.empty()) {
    os << " <- ";
    bool first = true;
    for (const Atom& a : pos) {
      if (!first) os << ", ";
      first = false;
      os << a.to_string();
    }
    for (const Atom& a : neg) {
      if (!first) os << ", ";
      first = false;
      os << "not " << a.to_string();
    }
  }
  os << '.';
  return os.str();
}

bool Instance::insert(const Fact& f) {
  bool added = by_pred_[f.pred].insert(f.args).second;
  if (added) ++size_;
  return added;
}

bool Instance::insert(Fact&& f) {
  bool added = by_pred_[f.pred].insert(std::move(f.args)).second;
  if (added) ++size_;
  return added;
}

void Instance::insert_all(const Instance& other) {
  for (const auto& [pred, tuples] : other.by_pred_) {
    auto& mine = by_pred_[pred];
    for (const auto& t : tuples)
      if (mine.insert(t).second) ++size_;
  }
}

bool Instance::contains(const Fact& f) const {
  auto it = by_pred_.find(f.pred);
  return it != by_pred_.end() && it->second.count(f.args);
}

bool Instance::erase(const Fact& f) {
  auto it = by_pred_.find(f.pred);
  if (it == by_pred_.end()) return false;
  if (it->second.erase(f.args)) {
    --size_;
    if (it->second.empty()) by_pred_.erase(it);
    return true;
  }
  return false;
}

const std::set<std::vector<Value>>& Instance::tuples(const std::string& pred) const {
  static const std::set<std::vector<Value>> kEmpty;
  auto it = by_pred_.find(pred);
  return it == by_pred_.end() ? kEmpty : it->second;
}

std::vector<Fact> Instance::facts() const {
  std::vector<Fact> out;
  out.reserve(size_);
  for (const auto& [pred, tuples] : by_pred_)
    for (const auto& t : tuples) out.push_back(Fact{pred, t});
  return out;
}

std::vector<std::string> Instance::predicates() const {
  std::vector<std::string> out;
  out.reserve(by_pred_.size());
  for (const auto& [pred, tuples] : by_pred_)
    if (!tuples.empty()) out.push_back(pred);
  return out;
}

bool Instance::subset_of(const Instance& other) const {
  for (const auto& [pred, tuples] : by_pred_) {
    const auto& theirs = other.tuples(pred);
    for (const auto& t : tuples)
      if (!theirs.count(t)) return false;
  }
  return true;
}

Instance Instance::restricted_to(const std::set<std::string>& preds) const {
  Instance out;
  for (const auto& [pred, tuples] : by_pred_) {
    if (!preds.count(pred)) continue;
    out.by_pred_[pred] = tuples;
    out.size_ += tuples.size();
  }
  return out;
}

Instance Instance::difference(const Instance& other) const {
  Instance out;
  for (const auto& [pred, tuples] : by_pred_) {
    const auto& theirs = other.tuples(pred);
    for (const auto& t : tuples)
      if (!theirs.count(t)) out.insert(Fact{pred, t});
  }
  return out;
}

std::set<Value> Instance::adom() const {
  std::set<Value> out;
  for (const auto& [pred, tuples] : by_pred_)
    for (const auto& t : tuples) out.insert(t.begin(), t.end());
  return out;
}

Program::Program(std::vector<Rule> rules) : rules_(std::move(rules)) {
  for (Rule& r : rules_) r = r.normalized();
  std::sort(rules_.begin(), rules_.end());
  rules_.erase(std::unique(rules_.begin(), rules_.end()), rules_.end());
}

namespace {
void note_arity(Schema& sch, const Atom& a) {
  auto [it, fresh] = sch.emplace(a.pred, a.args.size());
  if (!fresh && it->second != a.args.size())
    throw SchemaError("relation '" + a.pred + "' used with arities " +
                      std::to_string(it->second) + " and " +
                      std::to_string(a.args.size()));
}
}  // namespace

Schema Program::sch() const {
  Schema out;
  for (const Rule& r : rules_) {
    note_arity(out, r.head);
    for (const Atom& a : r.pos) note_arity(out, a);
    for (const Atom& a : r.neg) note_arity(out, a);
  }
  return out;
}

std::set<std::string> Program::idb() const {
  std::set<std::string> out;
  for (const Rule& r : rules_) out.insert(r.head.pred);
  return out;
}

std::set<std::string> Program::edb() const {
  std::set<std::string> out;
  std::set<std::string> heads = idb();
  for (const auto& [name, arity] : sch())
    if (!heads.count(name)) out.insert(name);
  return out;
}

std::set<Value> Program::constants() const {
  std::set<Value> out;
  auto scan = [&out](const Atom& a) {
    for (const Term& t : a.args)
      if (const auto* v = std::get_if<Value>(&t)) out.insert(*v);
  };
  for (const Rule& r : rules_) {
    scan(r.head);
    for (const Atom& a : r.pos) scan(a);
    for (const Atom& a : r.neg) scan(a);
  }
  return out;
}

void check_schema_compatible(const Program& p, const Instance& inst) {
  Schema sch = p.sch();
  for (const std::string& pred : inst.predicates()) {
    auto it = sch.find(pred);
    if (it == sch.end()) continue;
    for (const auto& t : inst.tuples(pred))
      if (t.size() != it->second)
        throw SchemaError("fact over '" + pred + "' has arity " +
                          std::to_string(t.size()) + ", schema says " +
                          std::to_string(it->second));
  }
}

}  // namespace dedalus
