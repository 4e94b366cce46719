#include "dedalus/dedalus.hpp"

#include <algorithm>
#include <sstream>

#include "dedalus/eval.hpp"
#include "json.hpp"

namespace dedalus {

std::string DedalusRule::to_string() const {
  std::string head = rule.head.to_string();
  if (kind == RuleKind::Inductive)
    head += "@next";
  else if (kind == RuleKind::Async)
    head += "@" + addressee;
  // Splice the annotation in after the head atom.
  return head + rule.to_string().substr(rule.head.to_string().size());
}

namespace {

bool atom_constant_free(const Atom& a) { return a.is_constant_free(); }

}  // namespace

DedalusProgram DedalusProgram::validate(
    std::vector<DedalusRule> rules, const std::vector<std::pair<int, int>>& positions) {
  auto pos_of = [&positions](std::size_t i) -> std::pair<int, int> {
    return i < positions.size() ? positions[i] : std::pair<int, int>{0, 0};
  };

  for (std::size_t i = 0; i < rules.size(); ++i) {
    const DedalusRule& dr = rules[i];
    auto [line, col] = pos_of(i);
    if (!dr.rule.is_safe())
      throw ParseError("unsafe rule: a variable does not occur in a positive body atom",
                       line, col);
    if (!atom_constant_free(dr.rule.head) ||
        !std::all_of(dr.rule.pos.begin(), dr.rule.pos.end(), atom_constant_free) ||
        !std::all_of(dr.rule.neg.begin(), dr.rule.neg.end(), atom_constant_free))
      throw ParseError("constant in rule: Dedalus rules are constant-free", line, col);
    if (dr.rule.pos.empty())
      throw ParseError("rule has no positive body atom", line, col);
    if (dr.kind == RuleKind::Async) {
      std::set<std::string> pos_vars;
      for (const Atom& a : dr.rule.pos) a.collect_vars(pos_vars);
      if (!pos_vars.count(dr.addressee))
        throw ParseError("addressee variable '" + dr.addressee +
                         "' does not occur in a positive body atom", line, col);
    }
  }

  DedalusProgram d;
  d.rules_ = std::move(rules);
  std::sort(d.rules_.begin(), d.rules_.end());
  d.rules_.erase(std::unique(d.rules_.begin(), d.rules_.end()), d.rules_.end());

  // Deductive subset must be syntactically stratifiable.
  std::vector<Rule> deduc;
  for (const DedalusRule& dr : d.rules_)
    if (dr.kind == RuleKind::Deductive) deduc.push_back(dr.rule);
  try {
    stratify(Program(deduc));
  } catch (const NotStratifiable& e) {
    throw ParseError(std::string("deductive subset ") + e.what(), 0, 0);
  }

  d.sch();  // throws SchemaError on arity conflicts

  std::set<std::string> async_heads, other_heads;
  for (const DedalusRule& dr : d.rules_)
    (dr.kind == RuleKind::Async ? async_heads : other_heads).insert(dr.rule.head.pred);
  for (const std::string& r : async_heads)
    if (other_heads.count(r))
      d.warnings_.push_back("relation '" + r +
                            "' is both an asynchronous and a local rule head");
  return d;
}

Schema DedalusProgram::sch() const {
  std::vector<Rule> plain;
  for (const DedalusRule& dr : rules_) plain.push_back(dr.rule);
  return Program(plain).sch();
}

std::set<std::string> DedalusProgram::idb() const {
  std::set<std::string> out;
  for (const DedalusRule& dr : rules_) out.insert(dr.rule.head.pred);
  return out;
}

std::set<std::string> DedalusProgram::edb() const {
  std::set<std::string> out;
  std::set<std::string> heads = idb();
  for (const auto& [name, arity] : sch())
    if (!heads.count(name)) out.insert(name);
  return out;
}

DedalusProgram parse_dedalus(const std::string& text) {
  std::vector<DedalusRule> rules;
  std::vector<std::pair<int, int>> positions;
  for (ParsedRule& pr : parse_rule_text(text)) {
    DedalusRule dr;
    switch (pr.annotation) {
      case HeadAnnotation::None: dr.kind = RuleKind::Deductive; break;
      case HeadAnnotation::Next: dr.kind = RuleKind::Inductive; break;
      case HeadAnnotation::Async:
        dr.kind = RuleKind::Async;
        dr.addressee = pr.addressee;
        break;
    }
    dr.rule = std::move(pr.rule);
    rules.push_back(std::move(dr));
    positions.emplace_back(pr.line, pr.col);
  }
  return DedalusProgram::validate(std::move(rules), positions);
}

std::string pretty(const DedalusProgram& d) {
  std::ostringstream os;
  for (const DedalusRule& dr : d.rules()) os << dr.to_string() << '\n';
  return os.str();
}

Subprograms split_subprograms(const DedalusProgram& d) {
  std::vector<Rule> deduc, induc, async;
  for (const DedalusRule& dr : d.rules()) {
    switch (dr.kind) {
      case RuleKind::Deductive:
        deduc.push_back(dr.rule);
        break;
      case RuleKind::Inductive:
        induc.push_back(dr.rule);
        break;
      case RuleKind::Async: {
        Rule r = dr.rule;
        r.head.args.insert(r.head.args.begin(), Variable{dr.addressee});
        async.push_back(std::move(r));
        break;
      }
    }
  }
  return Subprograms{Program(deduc), Program(induc), Program(async)};
}

namespace {

Value value_from_json(const nlohmann::json& j) {
  if (j.is_string()) return Value::sym(j.get<std::string>());
  if (j.is_number_unsigned()) return Value::ts(j.get<Timestamp>());
  throw InstanceError("fact arguments must be strings or natural numbers");
}

}  // namespace

DistributedInstance parse_instance(const std::string& json_text, const DedalusProgram& d) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
    throw InstanceError("expected an object with a \"nodes\" array");

  DistributedInstance h;
  for (const auto& n : doc["nodes"]) {
    if (!n.is_string()) throw InstanceError("node names must be strings");
    h.network.nodes.insert(n.get<std::string>());
  }
  if (h.network.nodes.empty()) throw InstanceError("network must be nonempty");
  for (const NodeId& n : h.network.nodes) h.facts[n];  // every node mapped

  Schema sch = d.sch();
  std::set<std::string> idb = d.idb();

  const nlohmann::json facts = doc.value("facts", nlohmann::json::object());
  if (!facts.is_object()) throw InstanceError("\"facts\" must be an object");
  for (const auto& [node, list] : facts.items()) {
    auto it = h.facts.find(node);
    if (it == h.facts.end())
      throw InstanceError("facts given for unknown node '" + node + "'");
    if (!list.is_array()) throw InstanceError("facts for a node must be an array");
    for (const auto& entry : list) {
      if (!entry.is_array() || entry.empty() || !entry[0].is_string())
        throw InstanceError("each fact must be an array starting with the relation name");
      Fact f{entry[0].get<std::string>(), {}};
      for (std::size_t i = 1; i < entry.size(); ++i)
        f.args.push_back(value_from_json(entry[i]));
      auto sit = sch.find(f.pred);
      if (sit == sch.end())
        throw InstanceError("unknown relation '" + f.pred + "'");
      if (idb.count(f.pred))
        throw InstanceError("fact over derived relation '" + f.pred +
                            "'; inputs range over edb relations only");
      if (f.args.size() != sit->second)
        throw InstanceError("fact over '" + f.pred + "' has arity " +
                            std::to_string(f.args.size()) + ", schema says " +
                            std::to_string(sit->second));
      it->second.insert(std::move(f));
    }
  }
  return h;
}

std::string instance_to_json(const DistributedInstance& h) {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (const NodeId& n : h.network.nodes) doc["nodes"].push_back(n);
  doc["facts"] = nlohmann::json::object();
  for (const auto& [node, inst] : h.facts) {
    nlohmann::json list = nlohmann::json::array();
    inst.for_each([&list](const Fact& f) {
      nlohmann::json entry = nlohmann::json::array();
      entry.push_back(f.pred);
      for (const Value& v : f.args) {
        if (v.is_symbol())
          entry.push_back(v.symbol());
        else
          entry.push_back(v.timestamp());
      }
      list.push_back(std::move(entry));
    });
    doc["facts"][node] = std::move(list);
  }
  return doc.dump(2) + "\n";
}

}  // namespace dedalus
