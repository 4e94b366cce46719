#include "dedalus/eval.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace dedalus {

namespace {

bool match_tuple(const Atom& a, const std::vector<Value>& tuple, Valuation& v,
                 std::vector<std::string>& bound_here) {
  if (a.args.size() != tuple.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (const auto* c = std::get_if<Value>(&a.args[i])) {
      if (*c != tuple[i]) return false;
    } else {
      const std::string& name = std::get<Variable>(a.args[i]).name;
      auto [it, fresh] = v.emplace(name, tuple[i]);
      if (fresh)
        bound_here.push_back(name);
      else if (it->second != tuple[i])
        return false;
    }
  }
  return true;
}

std::size_t count_unbound(const Atom& a, const Valuation& v) {
  std::size_t n = 0;
  for (const Term& t : a.args)
    if (const auto* var = std::get_if<Variable>(&t))
      if (!v.count(var->name)) ++n;
  return n;
}

bool neg_satisfied(const Rule& r, const Instance& neg_ref, const Valuation& v) {
  for (const Atom& a : r.neg)
    if (neg_ref.contains(apply_valuation(a, v))) return false;
  return true;
}

// Joins the positive body left to right, greedily picking the most-bound
// remaining atom. Returns false if fn asked to stop.
bool join(const Rule& r, const Instance& I, const Instance& neg_ref,
          std::vector<const Atom*>& remaining, Valuation& v,
          const std::function<bool(const Valuation&)>& fn) {
  if (remaining.empty())
    return !neg_satisfied(r, neg_ref, v) || fn(v);

  std::size_t best = 0;
  std::size_t best_score = count_unbound(*remaining[0], v);
  for (std::size_t i = 1; i < remaining.size() && best_score > 0; ++i) {
    std::size_t s = count_unbound(*remaining[i], v);
    if (s < best_score) {
      best_score = s;
      best = i;
    }
  }
  const Atom* a = remaining[best];
  remaining.erase(remaining.begin() + best);

  bool keep_going = true;
  for (const auto& tuple : I.tuples(a->pred)) {
    std::vector<std::string> bound_here;
    if (match_tuple(*a, tuple, v, bound_here)) {
      keep_going = join(r, I, neg_ref, remaining, v, fn);
    }
    for (const std::string& name : bound_here) v.erase(name);
    if (!keep_going) break;
  }

  remaining.insert(remaining.begin() + best, a);
  return keep_going;
}

void for_each_valuation(const Rule& r, const Instance& I, const Instance& neg_ref,
                        const std::function<bool(const Valuation&)>& fn) {
  std::vector<const Atom*> remaining;
  remaining.reserve(r.pos.size());
  for (const Atom& a : r.pos) remaining.push_back(&a);
  Valuation v;
  join(r, I, neg_ref, remaining, v, fn);
}

// One round of head derivation with negation tested against neg_ref.
// Returns true if anything new was added to acc.
bool fire_rules(const std::vector<Rule>& rules, const Instance& pos_ref,
                const Instance& neg_ref, Instance& acc) {
  bool changed = false;
  for (const Rule& r : rules) {
    for_each_valuation(r, pos_ref, neg_ref, [&](const Valuation& v) {
      if (acc.insert(apply_valuation(r.head, v))) changed = true;
      return true;
    });
  }
  return changed;
}

// Fixpoint of the given rules starting from I; negation is tested against
// the growing result. Sound when negated relations cannot grow (semi-positive
// programs, or a single stratum over completed lower strata).
Instance fixpoint(const std::vector<Rule>& rules, const Instance& i) {
  Instance acc = i;
  while (fire_rules(rules, acc, acc, acc)) {
  }
  return acc;
}

}  // namespace

void for_each_satisfying_valuation(const Rule& r, const Instance& I,
                                   const std::function<bool(const Valuation&)>& fn) {
  for_each_valuation(r, I, I, fn);
}

Fact apply_valuation(const Atom& a, const Valuation& v) {
  Fact f{a.pred, {}};
  f.args.reserve(a.args.size());
  for (const Term& t : a.args) {
    if (const auto* c = std::get_if<Value>(&t)) {
      f.args.push_back(*c);
    } else {
      auto it = v.find(std::get<Variable>(t).name);
      assert(it != v.end() && "unsafe rule: variable unbound after join");
      f.args.push_back(it->second);
    }
  }
  return f;
}

Instance immediate_consequence(const Program& p, const Instance& j) {
  check_schema_compatible(p, j);
  Instance out = j;
  fire_rules(p.rules(), j, j, out);
  return out;
}

Instance one_step(const Program& p, const Instance& i) {
  Instance out;
  fire_rules(p.rules(), i, i, out);
  return out;
}

Instance semi_positive_fixpoint(const Program& p, const Instance& i) {
  std::set<std::string> idb = p.idb();
  for (const Rule& r : p.rules())
    for (const Atom& a : r.neg)
      if (idb.count(a.pred))
        throw NotSemiPositive("negation on derived relation '" + a.pred + "'");
  check_schema_compatible(p, i);
  return fixpoint(p.rules(), i);
}

NotStratifiable::NotStratifiable(std::vector<std::string> c)
    : std::runtime_error([&c] {
        std::ostringstream os;
        os << "not syntactically stratifiable; negative cycle through:";
        for (const std::string& r : c) os << ' ' << r;
        return os.str();
      }()),
      cycle(std::move(c)) {}

namespace {

struct DepGraph {
  std::vector<std::string> names;                 // sorted relation names
  std::map<std::string, int> index;
  std::set<std::pair<int, int>> pos_edges;        // body -> head
  std::set<std::pair<int, int>> neg_edges;
};

DepGraph dependency_graph(const Program& p) {
  DepGraph g;
  std::set<std::string> rel;
  for (const auto& [name, arity] : p.sch()) rel.insert(name);
  g.names.assign(rel.begin(), rel.end());
  for (int i = 0; i < static_cast<int>(g.names.size()); ++i) g.index[g.names[i]] = i;
  for (const Rule& r : p.rules()) {
    int head = g.index.at(r.head.pred);
    for (const Atom& a : r.pos) g.pos_edges.emplace(g.index.at(a.pred), head);
    for (const Atom& a : r.neg) g.neg_edges.emplace(g.index.at(a.pred), head);
  }
  return g;
}

// Tarjan over the union of positive and negative edges.
struct Tarjan {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> idx, low, comp;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  int counter = 0, ncomp = 0;

  explicit Tarjan(const std::vector<std::vector<int>>& a)
      : adj(a), idx(a.size(), -1), low(a.size(), 0), comp(a.size(), -1),
        on_stack(a.size(), false) {
    for (int v = 0; v < static_cast<int>(a.size()); ++v)
      if (idx[v] < 0) visit(v);
  }

  void visit(int v) {
    idx[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : adj[v]) {
      if (idx[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], idx[w]);
      }
    }
    if (low[v] == idx[v]) {
      while (true) {
        int w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  }
};

}  // namespace

StratumMap stratify(const Program& p) {
  DepGraph g = dependency_graph(p);
  int n = static_cast<int>(g.names.size());
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : g.pos_edges) adj[a].push_back(b);
  for (auto [a, b] : g.neg_edges) adj[a].push_back(b);
  Tarjan t(adj);

  for (auto [a, b] : g.neg_edges) {
    if (t.comp[a] != t.comp[b]) continue;
    std::vector<std::string> cycle;
    for (int v = 0; v < n; ++v)
      if (t.comp[v] == t.comp[a]) cycle.push_back(g.names[v]);
    throw NotStratifiable(std::move(cycle));
  }

  // Longest negative-edge distance over the condensation. Tarjan numbers
  // components in reverse topological order, so iterating ncomp-1 .. 0
  // visits sources first.
  std::vector<std::vector<std::pair<int, int>>> in_edges(t.ncomp);  // (src comp, weight)
  for (auto [a, b] : g.pos_edges)
    if (t.comp[a] != t.comp[b]) in_edges[t.comp[b]].emplace_back(t.comp[a], 0);
  for (auto [a, b] : g.neg_edges)
    if (t.comp[a] != t.comp[b]) in_edges[t.comp[b]].emplace_back(t.comp[a], 1);

  std::vector<int> stratum(t.ncomp, 1);
  for (int c = t.ncomp - 1; c >= 0; --c)
    for (auto [src, w] : in_edges[c])
      stratum[c] = std::max(stratum[c], stratum[src] + w);

  std::set<std::string> idb = p.idb();
  StratumMap out;
  for (int v = 0; v < n; ++v)
    if (idb.count(g.names[v])) out[g.names[v]] = stratum[t.comp[v]];
  return out;
}

Instance stratified_eval(const Program& p, const Instance& i) {
  StratumMap sigma = stratify(p);
  check_schema_compatible(p, i);
  int max_stratum = 1;
  for (const auto& [rel, s] : sigma) max_stratum = std::max(max_stratum, s);

  Instance acc = i;
  for (int s = 1; s <= max_stratum; ++s) {
    std::vector<Rule> layer;
    for (const Rule& r : p.rules())
      if (sigma.at(r.head.pred) == s) layer.push_back(r);
    acc = fixpoint(layer, acc);
  }
  return acc;
}

namespace {

void enumerate_groundings(const Rule& r, const std::vector<std::string>& vars,
                          const std::vector<Value>& dom, std::size_t k,
                          Valuation& v, std::vector<Rule>& out) {
  if (k == vars.size()) {
    Rule g;
    g.head = to_atom(apply_valuation(r.head, v));
    for (const Atom& a : r.pos) g.pos.push_back(to_atom(apply_valuation(a, v)));
    for (const Atom& a : r.neg) g.neg.push_back(to_atom(apply_valuation(a, v)));
    out.push_back(g.normalized());
    return;
  }
  for (const Value& val : dom) {
    v.insert_or_assign(vars[k], val);
    enumerate_groundings(r, vars, dom, k + 1, v, out);
  }
  v.erase(vars[k]);
}

}  // namespace

GroundProgram ground(const Program& p, const Instance& i) {
  std::set<Value> dom_set = i.adom();
  std::set<Value> consts = p.constants();
  dom_set.insert(consts.begin(), consts.end());
  std::vector<Value> dom(dom_set.begin(), dom_set.end());

  GroundProgram g;
  g.source = p;
  g.base = i;
  for (const Rule& r : p.rules()) {
    std::set<std::string> var_set = r.vars();
    std::vector<std::string> vars(var_set.begin(), var_set.end());
    Valuation v;
    enumerate_groundings(r, vars, dom, 0, v, g.rules);
  }
  std::sort(g.rules.begin(), g.rules.end());
  g.rules.erase(std::unique(g.rules.begin(), g.rules.end()), g.rules.end());
  return g;
}

std::vector<Rule> reduct(const GroundProgram& g, const Instance& m) {
  std::vector<Rule> out;
  for (const Rule& r : g.rules) {
    bool blocked = false;
    for (const Atom& a : r.neg)
      if (m.contains(to_fact(a))) {
        blocked = true;
        break;
      }
    if (blocked) continue;
    Rule pos = r;
    pos.neg.clear();
    out.push_back(pos);
  }
  return out;
}

StableVerdict is_stable_model(const Program& p, const Instance& i, const Instance& m) {
  GroundProgram g = ground(p, i);
  std::vector<Rule> red = reduct(g, m);
  Instance n = fixpoint(red, i);
  StableVerdict v;
  v.missing = m.difference(n);
  v.extra = n.difference(m);
  v.stable = v.missing.empty() && v.extra.empty();
  return v;
}

Instance fixpoint_with_fixed_negation(const Program& p, const Instance& i,
                                      const Instance& m) {
  Instance acc = i;
  while (fire_rules(p.rules(), acc, m, acc)) {
  }
  return acc;
}

}  // namespace dedalus
