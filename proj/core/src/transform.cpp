#include "dedalus/transform.hpp"

#include <algorithm>

namespace dedalus {

Instance time_instance(const TimeWindow& w) {
  Instance out;
  for (Timestamp s = 0; s <= w.t_max; ++s) {
    out.insert(Fact{"time", {Value::ts(s)}});
    if (s < w.t_max) out.insert(Fact{"tsucc", {Value::ts(s), Value::ts(s + 1)}});
    for (Timestamp t = 0; t <= w.t_max; ++t) {
      if (s < t) out.insert(Fact{"lt", {Value::ts(s), Value::ts(t)}});
      if (s != t) out.insert(Fact{"neq", {Value::ts(s), Value::ts(t)}});
    }
  }
  return out;
}

Instance decl_input(const DistributedInstance& h, const TimeWindow& w) {
  Instance out = time_instance(w);
  for (const auto& [node, inst] : h.facts) {
    out.insert(Fact{"all", {Value::sym(node)}});
    inst.for_each([&out, &node, &w](const Fact& f) {
      for (Timestamp s = 0; s <= w.t_max; ++s) {
        Fact lifted{f.pred, {Value::sym(node), Value::ts(s)}};
        lifted.args.insert(lifted.args.end(), f.args.begin(), f.args.end());
        out.insert(std::move(lifted));
      }
    });
  }
  return out;
}

namespace {

const char* const kReservedNames[] = {"all",       "time",      "tsucc",
                                      "lt",        "neq",       "before",
                                      "hassender", "issmaller", "hasmax",
                                      "rcvinf"};
const char* const kReservedPrefixes[] = {"cand_", "chosen_", "other_"};

}  // namespace

bool is_reserved_relation(const std::string& name) {
  for (const char* r : kReservedNames)
    if (name == r) return true;
  for (const char* p : kReservedPrefixes)
    if (name.rfind(p, 0) == 0) return true;
  return false;
}

namespace {

Term var(const std::string& name) { return Variable{name}; }

struct Builder {
  // Location/timestamp variables spliced into lifted original rules; must
  // not collide with any variable of D. The generic rules ((4)-(14)) share
  // no atoms with D, so their variable names are unconstrained.
  std::string X, S, T;
  std::vector<Rule> out;

  explicit Builder(const DedalusProgram& d) {
    std::set<std::string> used;
    for (const DedalusRule& dr : d.rules()) {
      std::set<std::string> vs = dr.rule.vars();
      used.insert(vs.begin(), vs.end());
    }
    auto fresh = [&used](std::string base) {
      while (used.count(base)) base += "_";
      return base;
    };
    X = fresh("X");
    S = fresh("S");
    T = fresh("T");
  }

  Atom lift(const Atom& a, const std::string& loc, const std::string& ts) const {
    Atom l{a.pred, {var(loc), var(ts)}};
    l.args.insert(l.args.end(), a.args.begin(), a.args.end());
    return l;
  }

  Rule lift_body(const DedalusRule& dr) const {
    Rule r;
    for (const Atom& a : dr.rule.pos) r.pos.push_back(lift(a, X, S));
    for (const Atom& a : dr.rule.neg) r.neg.push_back(lift(a, X, S));
    return r;
  }

  // Rule (1): derived facts are visible within the same step.
  void deductive_rule(const DedalusRule& dr) {
    Rule r = lift_body(dr);
    r.head = lift(dr.rule.head, X, S);
    out.push_back(r);
  }

  // Rule (2): derived facts become visible in the next step, same node.
  void inductive_rule(const DedalusRule& dr) {
    Rule r = lift_body(dr);
    r.head = lift(dr.rule.head, X, T);
    r.pos.push_back(Atom{"tsucc", {var(S), var(T)}});
    out.push_back(r);
  }

  // Rule (3) or, with the causality guard, rule (9). The head keeps the
  // original rule's argument tuple; the addressee occurs in the body.
  void cand_rule(const DedalusRule& dr, bool causal) {
    Rule r = lift_body(dr);
    r.head = Atom{"cand_" + dr.rule.head.pred,
                  {var(X), var(S), var(dr.addressee), var(T)}};
    r.head.args.insert(r.head.args.end(), dr.rule.head.args.begin(),
                       dr.rule.head.args.end());
    r.pos.push_back(Atom{"all", {var(dr.addressee)}});
    r.pos.push_back(Atom{"time", {var(T)}});
    if (causal)
      r.neg.push_back(Atom{"before", {var(dr.addressee), var(T), var(X), var(S)}});
    out.push_back(r);
  }

  // (x,s,y,t,w1..wk) argument tuple for the generic per-relation rules.
  static std::vector<Term> xsytw(std::size_t arity, const char* t = "T") {
    std::vector<Term> args{var("X"), var("S"), var("Y"), var(t)};
    for (std::size_t i = 0; i < arity; ++i)
      args.push_back(var("W" + std::to_string(i + 1)));
    return args;
  }

  // Rules (4), (5), (6) — once per asynchronous head relation.
  void choice_rules(const std::string& rel, std::size_t arity) {
    Atom cand{"cand_" + rel, xsytw(arity)};
    Atom chosen{"chosen_" + rel, xsytw(arity)};
    Atom other{"other_" + rel, xsytw(arity)};
    Atom chosen_t2{"chosen_" + rel, xsytw(arity, "T2")};

    out.push_back(Rule{chosen, {cand}, {other}});
    out.push_back(
        Rule{other, {cand, chosen_t2, Atom{"neq", {var("T"), var("T2")}}}, {}});

    Atom deliv{rel, {var("Y"), var("T")}};
    for (std::size_t i = 0; i < arity; ++i)
      deliv.args.push_back(var("W" + std::to_string(i + 1)));
    out.push_back(Rule{deliv, {chosen}, {}});
  }

  // Rules (7), (8): local succession and transitivity of before.
  void before_rules() {
    out.push_back(Rule{Atom{"before", {var("X"), var("S"), var("X"), var("T")}},
                       {Atom{"all", {var("X")}}, Atom{"tsucc", {var("S"), var("T")}}},
                       {}});
    out.push_back(Rule{Atom{"before", {var("X"), var("S"), var("Y"), var("T")}},
                       {Atom{"before", {var("X"), var("S"), var("Z"), var("U")}},
                        Atom{"before", {var("Z"), var("U"), var("Y"), var("T")}}},
                       {}});
  }

  // Rule (10): the send step happens before the arrival step.
  void before_send_rule(const std::string& rel, std::size_t arity) {
    out.push_back(Rule{Atom{"before", {var("X"), var("S"), var("Y"), var("T")}},
                       {Atom{"chosen_" + rel, xsytw(arity)}},
                       {}});
  }

  // Rule (11): register senders while the addressee step is not flooded.
  void hassender_rule(const std::string& rel, std::size_t arity) {
    out.push_back(Rule{Atom{"hassender", {var("Y"), var("T"), var("X"), var("S")}},
                       {Atom{"chosen_" + rel, xsytw(arity)}},
                       {Atom{"rcvinf", {var("Y"), var("T")}}}});
  }

  // Rules (12), (13), (14) — once.
  void finiteness_rules() {
    Atom hs{"hassender", {var("Y"), var("T"), var("X"), var("S")}};
    Atom hs2{"hassender", {var("Y"), var("T"), var("X"), var("S2")}};
    out.push_back(Rule{Atom{"issmaller", {var("Y"), var("T"), var("X"), var("S")}},
                       {hs, hs2, Atom{"lt", {var("S"), var("S2")}}},
                       {}});
    out.push_back(Rule{Atom{"hasmax", {var("Y"), var("T"), var("X")}},
                       {hs},
                       {Atom{"issmaller", {var("Y"), var("T"), var("X"), var("S")}}}});
    out.push_back(Rule{Atom{"rcvinf", {var("Y"), var("T")}},
                       {hs},
                       {Atom{"hasmax", {var("Y"), var("T"), var("X")}}}});
  }
};

std::vector<std::pair<std::string, std::size_t>> async_heads(const DedalusProgram& d) {
  std::map<std::string, std::size_t> heads;
  for (const DedalusRule& dr : d.rules())
    if (dr.kind == RuleKind::Async)
      heads.emplace(dr.rule.head.pred, dr.rule.head.args.size());
  return {heads.begin(), heads.end()};
}

void check_reserved(const DedalusProgram& d) {
  for (const auto& [name, arity] : d.sch())
    if (is_reserved_relation(name))
      throw ReservedNameError("relation name '" + name +
                              "' is reserved for the transformation output");
}

}  // namespace

TransformedProgram transform(const DedalusProgram& d, TransformMode mode) {
  check_reserved(d);
  Builder b(d);
  bool causal = mode != TransformMode::Choice;

  for (const DedalusRule& dr : d.rules())
    if (dr.kind == RuleKind::Deductive) b.deductive_rule(dr);
  for (const DedalusRule& dr : d.rules())
    if (dr.kind == RuleKind::Inductive) b.inductive_rule(dr);
  for (const DedalusRule& dr : d.rules())
    if (dr.kind == RuleKind::Async) b.cand_rule(dr, causal);

  auto heads = async_heads(d);
  for (const auto& [rel, arity] : heads) b.choice_rules(rel, arity);

  if (causal) {
    b.before_rules();
    for (const auto& [rel, arity] : heads) b.before_send_rule(rel, arity);
  }
  if (mode == TransformMode::CausalFinite) {
    for (const auto& [rel, arity] : heads) b.hassender_rule(rel, arity);
    b.finiteness_rules();
  }

  TransformedProgram tp;
  tp.mode = mode;
  tp.rules = std::move(b.out);
  return tp;
}

TransformedProgram transform_choice(const DedalusProgram& d) {
  return transform(d, TransformMode::Choice);
}
TransformedProgram transform_causal(const DedalusProgram& d) {
  return transform(d, TransformMode::Causal);
}
TransformedProgram transform_causfin(const DedalusProgram& d) {
  return transform(d, TransformMode::CausalFinite);
}

}  // namespace dedalus
