#include "dedalus/correspondence.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

#include "dedalus/eval.hpp"

namespace dedalus {

namespace {

std::string step_str(const NodeStep& p) {
  return "(" + p.first + "," + std::to_string(p.second) + ")";
}

Fact lt_fact(const std::string& pred, const NodeId& x, Timestamp s,
             const std::vector<Value>& args) {
  Fact f{pred, {Value::sym(x), Value::ts(s)}};
  f.args.insert(f.args.end(), args.begin(), args.end());
  return f;
}

Fact aux5(const std::string& pred, const NodeId& x, Timestamp s, const NodeId& y,
          Timestamp t, const std::vector<Value>& args) {
  Fact f{pred, {Value::sym(x), Value::ts(s), Value::sym(y), Value::ts(t)}};
  f.args.insert(f.args.end(), args.begin(), args.end());
  return f;
}

bool in_window(const Fact& f, Timestamp t_check) {
  for (const Value& v : f.args)
    if (v.is_timestamp() && v.timestamp() > t_check) return false;
  return true;
}

}  // namespace

Instance restrict_trace_to_window(const Instance& trace_facts, const Window& w) {
  Instance out;
  trace_facts.for_each([&](const Fact& f) {
    if (f.args.size() >= 2 && f.args[1].is_timestamp() &&
        f.args[1].timestamp() <= w.t_check)
      out.insert(f);
  });
  return out;
}

ModelCandidate run_to_model(const RunPrefix& run) {
  ClockIndex ci = clocks(run);
  ArrivalMap arr = arrival(run);
  HappensBefore hb = happens_before(run);

  std::map<NodeId, std::size_t> activations;
  for (const TransitionRecord& tr : run.transitions) ++activations[tr.active];
  std::int64_t tg = -1;
  for (const NodeId& x : run.input.network.nodes) {
    auto it = activations.find(x);
    std::int64_t done = it == activations.end() ? 0 : static_cast<std::int64_t>(it->second);
    tg = (tg < 0) ? done - 1 : std::min(tg, done - 1);
  }
  if (tg < 0)
    throw WindowError("prefix too short: the grounding window is empty");

  // Every message sent inside the check window must also arrive inside the
  // grounding window; otherwise its choice is cut open at the boundary. A
  // pending message arrives at its addressee's next activation at the
  // earliest, which is past t_ground, so only its send step is excluded.
  std::int64_t tc = tg;
  for (const auto& [key, k] : arr.at) {
    std::size_t i = std::get<0>(key);
    if (static_cast<std::int64_t>(ci.loc[k]) > tg)
      tc = std::min(tc, static_cast<std::int64_t>(ci.loc[i]) - 1);
  }
  for (const auto& [i, y, f] : arr.pending)
    tc = std::min(tc, static_cast<std::int64_t>(ci.loc[i]) - 1);
  if (tc < 0)
    throw WindowError("prefix too short: the check window is empty");

  ModelCandidate m;
  m.origin = ModelOrigin::FromRun;
  m.window = Window{static_cast<Timestamp>(tg), static_cast<Timestamp>(tc)};
  m.facts = decl_input(run.input, TimeWindow{m.window.t_ground});

  Timestamp tgu = m.window.t_ground;
  for (std::size_t i = 0; i < run.transitions.size(); ++i) {
    const TransitionRecord& tr = run.transitions[i];
    Timestamp si = ci.loc[i];
    if (si > tgu) continue;
    const NodeStep here{tr.active, si};

    // Causality slice: all happens-before predecessors of this step.
    for (const auto& [edge, mask] : hb.edges) {
      if (edge.second != here || edge.first.second > tgu) continue;
      m.facts.insert(aux5("before", edge.first.first, edge.first.second, tr.active,
                          si, {}));
    }

    // Finiteness slice: senders of the messages delivered here.
    std::set<NodeStep> senders;
    for (const TaggedMessage& msg : tr.delivered)
      senders.emplace(run.transitions[msg.tag].active, ci.loc[msg.tag]);
    for (const NodeStep& snd : senders) {
      m.facts.insert(aux5("hassender", tr.active, si, snd.first, snd.second, {}));
      m.facts.insert(Fact{"hasmax", {Value::sym(tr.active), Value::ts(si),
                                     Value::sym(snd.first)}});
      for (const NodeStep& other : senders)
        if (other.first == snd.first && snd.second < other.second)
          m.facts.insert(
              aux5("issmaller", tr.active, si, snd.first, snd.second, {}));
    }

    // Deductive slice: D_i lifted to this step.
    tr.deductive.for_each(
        [&](const Fact& f) { m.facts.insert(lt_fact(f.pred, tr.active, si, f.args)); });

    // Sending slice: one choice per message generated here.
    for (const auto& [addressee, msgs] : tr.sent) {
      for (const TaggedMessage& msg : msgs) {
        auto ait = arr.at.find({i, addressee, msg.fact});
        bool delivered_inside =
            ait != arr.at.end() && ci.loc[ait->second] <= tgu;
        Timestamp t_arr = delivered_inside ? ci.loc[ait->second] : 0;
        // A message arriving beyond t_ground has no in-universe arrival: every
        // in-universe timestamp is an "other". Leaving the group open instead
        // would let the reduct fixpoint choose arbitrary (even backward)
        // arrivals, whose before-facts re-enter the window transitively.
        for (Timestamp t = 0; t <= tgu; ++t) {
          if (hb.related({addressee, t}, here)) continue;  // causally excluded
          m.facts.insert(
              aux5("cand_" + msg.fact.pred, tr.active, si, addressee, t, msg.fact.args));
          if (!delivered_inside || t != t_arr)
            m.facts.insert(aux5("other_" + msg.fact.pred, tr.active, si, addressee, t,
                                msg.fact.args));
        }
        if (delivered_inside)
          m.facts.insert(aux5("chosen_" + msg.fact.pred, tr.active, si, addressee,
                              t_arr, msg.fact.args));
      }
    }
  }
  return m;
}

namespace {

// Signature of location/timestamp positions per relation; -1 = payload.
enum Pos { L, T, P };

std::vector<Pos> signature(const std::string& pred, std::size_t arity) {
  auto prefixed = [&pred](const char* p) { return pred.rfind(p, 0) == 0; };
  if (pred == "all") return {L};
  if (pred == "time") return {T};
  if (pred == "tsucc" || pred == "lt" || pred == "neq") return {T, T};
  if (pred == "before" || pred == "hassender" || pred == "issmaller")
    return {L, T, L, T};
  if (pred == "hasmax") return {L, T, L};
  if (pred == "rcvinf") return {L, T};
  std::vector<Pos> sig;
  if (prefixed("cand_") || prefixed("chosen_") || prefixed("other_"))
    sig = {L, T, L, T};
  else
    sig = {L, T};  // lifted relation of the original schema
  while (sig.size() < arity) sig.push_back(P);
  return sig;
}

}  // namespace

void check_well_formed(const ModelCandidate& m) {
  std::string err;
  m.facts.for_each([&](const Fact& f) {
    if (!err.empty()) return;
    std::vector<Pos> sig = signature(f.pred, f.args.size());
    if (sig.size() != f.args.size()) {
      err = "fact " + f.to_string() + " has the wrong arity for its relation";
      return;
    }
    for (std::size_t i = 0; i < sig.size(); ++i) {
      if (sig[i] == L && !f.args[i].is_symbol())
        err = "fact " + f.to_string() + ": argument " + std::to_string(i) +
              " must be a node symbol";
      if (sig[i] == T &&
          (!f.args[i].is_timestamp() || f.args[i].timestamp() > m.window.t_ground))
        err = "fact " + f.to_string() + ": argument " + std::to_string(i) +
              " must be a timestamp within the window";
    }
  });
  if (!err.empty()) throw IllFormedModel(err);
}

Verdict windowed_stable_check(const TransformedProgram& p, const Instance& i,
                              const ModelCandidate& m) {
  check_well_formed(m);
  Instance n = fixpoint_with_fixed_negation(p.program(), i, m.facts);
  Verdict v;
  m.facts.for_each([&](const Fact& f) {
    if (in_window(f, m.window.t_check) && !n.contains(f)) v.missing.insert(f);
  });
  n.for_each([&](const Fact& f) {
    if (in_window(f, m.window.t_check) && !m.facts.contains(f)) v.extra.insert(f);
  });
  v.accepted = v.missing.empty() && v.extra.empty();
  return v;
}

CycleDetected::CycleDetected(std::string msg, std::vector<NodeStep> w)
    : std::runtime_error(std::move(msg)), witness(std::move(w)) {}

NotTransitive::NotTransitive(std::string msg, std::vector<NodeStep> w)
    : std::runtime_error(std::move(msg)), witness(std::move(w)) {}

HappensBefore extract_model_order(const ModelCandidate& m) {
  check_well_formed(m);

  std::set<std::pair<NodeStep, NodeStep>> edges;
  m.facts.for_each([&](const Fact& f) {
    if (f.pred != "before") return;
    edges.insert({{f.args[0].symbol(), f.args[1].timestamp()},
                  {f.args[2].symbol(), f.args[3].timestamp()}});
  });

  std::set<std::pair<NodeStep, NodeStep>> chosen_edges;
  m.facts.for_each([&](const Fact& f) {
    if (f.pred.rfind("chosen_", 0) != 0) return;
    chosen_edges.insert({{f.args[0].symbol(), f.args[1].timestamp()},
                         {f.args[2].symbol(), f.args[3].timestamp()}});
  });

  for (const auto& [a, b] : edges) {
    if (a == b)
      throw CycleDetected("before(" + step_str(a) + "," + step_str(b) +
                          ") is reflexive", {a});
    if (edges.count({b, a}))
      throw CycleDetected("before-cycle between " + step_str(a) + " and " +
                          step_str(b), {a, b});
  }
  for (const auto& [a, b] : edges)
    for (const auto& [b2, c] : edges) {
      if (b != b2 || a == c) continue;
      if (!edges.count({a, c}))
        throw NotTransitive("before(" + step_str(a) + "," + step_str(b) +
                            ") and before(" + step_str(b) + "," + step_str(c) +
                            ") without before(" + step_str(a) + "," + step_str(c) + ")",
                            {a, b, c});
    }

  HappensBefore hb;
  for (const auto& edge : edges) {
    const auto& [a, b] = edge;
    unsigned mask = 0;
    if (a.first == b.first && b.second == a.second + 1 &&
        m.facts.contains(Fact{"all", {Value::sym(a.first)}}) &&
        m.facts.contains(
            Fact{"tsucc", {Value::ts(a.second), Value::ts(b.second)}}))
      mask |= kLocalEdge;
    if (chosen_edges.count(edge)) mask |= kMessageEdge;
    for (const auto& [a2, z] : edges)
      if (a2 == a && z != b && edges.count({z, b})) {
        mask |= kTransitiveEdge;
        break;
      }
    hb.edges[edge] = mask;
  }
  return hb;
}

namespace {

// The transformed inductive rules: head over the lifted original schema and
// a positive tsucc atom in the body. No other transformation rule has both.
Program inductive_fragment(const DedalusProgram& d) {
  TransformedProgram tp = transform_causfin(d);
  Schema sch = d.sch();
  std::vector<Rule> rules;
  for (const Rule& r : tp.rules) {
    if (!sch.count(r.head.pred)) continue;
    bool has_tsucc = std::any_of(r.pos.begin(), r.pos.end(),
                                 [](const Atom& a) { return a.pred == "tsucc"; });
    if (has_tsucc) rules.push_back(r);
  }
  return Program(rules);
}

}  // namespace

RunPrefix model_to_run(const ModelCandidate& m, const DedalusProgram& d,
                       const DistributedInstance& h) {
  HappensBefore order = extract_model_order(m);

  std::vector<NodeId> nodes(h.network.nodes.begin(), h.network.nodes.end());
  for (const auto& [edge, mask] : order.edges)
    for (const NodeStep& p : {edge.first, edge.second})
      if (!h.network.nodes.count(p.first))
        throw IllFormedModel("before-fact mentions unknown node '" + p.first + "'");

  // Deterministic linear extension over nodes x timestamps 0..t_ground:
  // repeatedly emit the smallest (timestamp, node) pair whose model-order
  // predecessors were all emitted.
  std::map<NodeStep, std::size_t> pending_preds;
  std::map<NodeStep, std::vector<NodeStep>> successors;
  for (const NodeId& x : nodes)
    for (Timestamp s = 0; s <= m.window.t_ground; ++s) pending_preds[{x, s}] = 0;
  for (const auto& [edge, mask] : order.edges) {
    if (!pending_preds.count(edge.first) || !pending_preds.count(edge.second)) continue;
    ++pending_preds[edge.second];
    successors[edge.first].push_back(edge.second);
  }
  std::set<std::pair<Timestamp, NodeId>> ready;
  for (const auto& [p, cnt] : pending_preds)
    if (cnt == 0) ready.insert({p.second, p.first});
  std::vector<NodeStep> seq;
  std::map<NodeStep, std::size_t> glob;
  while (!ready.empty()) {
    auto [s, x] = *ready.begin();
    ready.erase(ready.begin());
    NodeStep p{x, s};
    glob[p] = seq.size();
    seq.push_back(p);
    for (const NodeStep& q : successors[p])
      if (--pending_preds[q] == 0) ready.insert({q.second, q.first});
  }
  if (seq.size() != pending_preds.size())
    throw CycleDetected("model order admits no linear extension", {});

  // Inductively derived state facts: active ground instances of the
  // transformed inductive rules.
  Instance m_ind = one_step(inductive_fragment(d), m.facts);

  std::set<std::string> edb = d.edb();
  std::set<std::string> idb = d.idb();
  auto formula_state = [&](const NodeId& x, Timestamp s) {
    Instance out;
    m.facts.for_each([&](const Fact& f) {
      if (!edb.count(f.pred) && !idb.count(f.pred)) return;
      bool edb_here = edb.count(f.pred) != 0;
      bool ind_here = m_ind.contains(f);
      if (!edb_here && !ind_here) return;
      if (f.args.size() < 2 || !f.args[0].is_symbol() || !f.args[1].is_timestamp())
        return;
      if (f.args[0].symbol() != x || f.args[1].timestamp() != s) return;
      out.insert(Fact{f.pred, {f.args.begin() + 2, f.args.end()}});
    });
    return out;
  };

  // Deliveries per ordinal, read off the chosen-facts.
  std::map<std::size_t, std::set<TaggedMessage>> deliveries;
  std::string chosen_err;
  m.facts.for_each([&](const Fact& f) {
    if (f.pred.rfind("chosen_", 0) != 0 || !chosen_err.empty()) return;
    NodeStep from{f.args[0].symbol(), f.args[1].timestamp()};
    NodeStep to{f.args[2].symbol(), f.args[3].timestamp()};
    auto fit = glob.find(from);
    auto tit = glob.find(to);
    if (fit == glob.end() || tit == glob.end()) {
      chosen_err = "fact " + f.to_string() + " mentions a step outside the window";
      return;
    }
    Fact payload{f.pred.substr(7), {f.args.begin() + 4, f.args.end()}};
    deliveries[tit->second].insert(TaggedMessage{fit->second, std::move(payload)});
  });
  if (!chosen_err.empty()) throw IllFormedModel(chosen_err);

  RunPrefix run;
  run.program = d;
  run.subs = split_subprograms(d);
  run.input = h;

  Configuration cnf = start_configuration(d, h);
  for (const NodeId& x : nodes) {
    Instance want = formula_state(x, 0);
    if (!(want == cnf.state.at(x)))
      throw InvalidTransition("state of '" + x +
                              "' at timestamp 0 disagrees with the input");
  }

  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& [x, s] = seq[i];
    std::set<TaggedMessage> mi = deliveries.count(i) ? deliveries.at(i)
                                                     : std::set<TaggedMessage>{};
    for (const TaggedMessage& msg : mi)
      if (!cnf.buffer[x].count(msg))
        throw InvalidTransition("transition " + std::to_string(i) + " delivers " +
                                msg.fact.to_string() +
                                " which was never sent to '" + x + "'");
    if (s <= m.window.t_check) {
      Instance want = formula_state(x, s);
      if (!(want == cnf.state.at(x))) {
        Instance miss = want.difference(cnf.state.at(x));
        Instance extra = cnf.state.at(x).difference(want);
        std::ostringstream os;
        os << "state of '" << x << "' at timestamp " << s
           << " disagrees with the model;";
        miss.for_each([&os](const Fact& f) { os << " model-only " << f.to_string(); });
        extra.for_each([&os](const Fact& f) { os << " run-only " << f.to_string(); });
        throw InvalidTransition(os.str());
      }
    }
    TransitionRecord tr = step(run.subs, h, cnf, x, mi, i);
    cnf = tr.target;
    run.transitions.push_back(std::move(tr));
  }
  return run;
}

Report verify_theorem(const DedalusProgram& d, const DistributedInstance& h,
                      const Scheduler& sched, std::size_t n) {
  Report rep;
  try {
    RunPrefix run = simulate(d, h, sched, n);
    rep.simulated = true;
    ModelCandidate m = run_to_model(run);
    rep.model_built = true;
    rep.window = m.window;

    TransformedProgram tp = transform_causfin(d);
    Instance input = decl_input(h, TimeWindow{m.window.t_ground});
    rep.stability = windowed_stable_check(tp, input, m);

    Instance base_trace = restrict_trace_to_window(trace(run), m.window);
    Schema sch = d.sch();
    Instance model_lt;
    m.facts.for_each([&](const Fact& f) {
      if (sch.count(f.pred) && f.args.size() >= 2 && f.args[1].is_timestamp() &&
          f.args[1].timestamp() <= m.window.t_check)
        model_lt.insert(f);
    });
    rep.model_trace_equal = model_lt == base_trace;

    RunPrefix rebuilt = model_to_run(m, d, h);
    rep.run_rebuilt = true;
    rep.roundtrip_trace_equal =
        restrict_trace_to_window(trace(rebuilt), m.window) == base_trace;

    rep.pass = rep.stability.accepted && rep.model_trace_equal &&
               rep.roundtrip_trace_equal;
  } catch (const std::exception& e) {
    rep.error = e.what();
    rep.pass = false;
  }
  return rep;
}

}  // namespace dedalus
