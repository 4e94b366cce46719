#include "dedalus/operational.hpp"

#include <algorithm>
#include <random>

#include "dedalus/eval.hpp"

namespace dedalus {

Configuration start_configuration(const DedalusProgram& d, const DistributedInstance& h) {
  (void)d;
  Configuration cnf;
  for (const auto& [node, inst] : h.facts) {
    cnf.state[node] = inst;
    cnf.buffer[node];  // empty
  }
  return cnf;
}

TransitionRecord step(const Subprograms& subs, const DistributedInstance& h,
                      const Configuration& cnf, const NodeId& x,
                      const std::set<TaggedMessage>& m, std::size_t i) {
  auto bit = cnf.buffer.find(x);
  const std::set<TaggedMessage>& buf =
      bit == cnf.buffer.end() ? std::set<TaggedMessage>{} : bit->second;
  for (const TaggedMessage& msg : m)
    if (!buf.count(msg))
      throw InvalidDelivery("delivered message not in the buffer of '" + x + "': " +
                            msg.fact.to_string());

  TransitionRecord tr;
  tr.source = cnf;
  tr.active = x;
  tr.delivered = m;
  tr.tag = i;

  Instance input = cnf.state.at(x);
  for (const TaggedMessage& msg : m) input.insert(msg.fact);
  tr.deductive = stratified_eval(subs.deductive, input);

  tr.target = cnf;
  Instance next_state = h.facts.at(x);
  next_state.insert_all(one_step(subs.inductive, tr.deductive));
  tr.target.state[x] = std::move(next_state);

  std::set<TaggedMessage>& own = tr.target.buffer[x];
  for (const TaggedMessage& msg : m) own.erase(msg);

  // Asynchronous heads carry the addressee as their first argument.
  Instance sends = one_step(subs.async, tr.deductive);
  sends.for_each([&](const Fact& f) {
    const Value& addr = f.args.front();
    if (!addr.is_symbol() || !h.network.nodes.count(addr.symbol()))
      return;  // addressee outside the network: dropped
    Fact payload{f.pred, {f.args.begin() + 1, f.args.end()}};
    TaggedMessage msg{i, std::move(payload)};
    tr.sent[addr.symbol()].insert(msg);
    tr.target.buffer[addr.symbol()].insert(std::move(msg));
  });
  return tr;
}

namespace {

std::vector<NodeId> sorted_nodes(const DistributedInstance& h) {
  return {h.network.nodes.begin(), h.network.nodes.end()};
}

}  // namespace

RunPrefix simulate(const DedalusProgram& d, const DistributedInstance& h,
                   const Scheduler& sched, std::size_t n) {
  RunPrefix run;
  run.program = d;
  run.subs = split_subprograms(d);
  run.input = h;

  std::vector<NodeId> nodes = sorted_nodes(h);
  Configuration cnf = start_configuration(d, h);
  std::mt19937_64 rng(sched.seed);

  // Activations of the addressee a message has already waited through.
  std::map<std::pair<NodeId, TaggedMessage>, std::size_t> age;

  for (std::size_t i = 0; i < n; ++i) {
    const NodeId& x = nodes[i % nodes.size()];
    std::vector<TaggedMessage> buf(cnf.buffer[x].begin(), cnf.buffer[x].end());

    std::set<TaggedMessage> m;
    switch (sched.policy) {
      case SchedulerPolicy::RoundRobin:
        m.insert(buf.begin(), buf.end());
        break;
      case SchedulerPolicy::SeededRandom:
        for (const TaggedMessage& msg : buf) {
          std::size_t waited = ++age[{x, msg}];
          if (waited >= sched.max_delay || (rng() & 1)) m.insert(msg);
        }
        break;
      case SchedulerPolicy::SingleDelivery:
        if (!buf.empty()) {
          std::size_t min_tag = buf.front().tag;
          for (const TaggedMessage& msg : buf) min_tag = std::min(min_tag, msg.tag);
          std::vector<TaggedMessage> group;
          for (const TaggedMessage& msg : buf)
            if (msg.tag == min_tag) group.push_back(msg);
          std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
          m.insert(group[pick(rng)]);
        }
        break;
    }
    for (const TaggedMessage& msg : m) age.erase({x, msg});

    TransitionRecord tr = step(run.subs, h, cnf, x, m, i);
    cnf = tr.target;
    run.transitions.push_back(std::move(tr));
  }
  return run;
}

ClockIndex clocks(const RunPrefix& run) {
  ClockIndex ci;
  std::map<NodeId, Timestamp> counter;
  ci.loc.reserve(run.transitions.size());
  for (std::size_t i = 0; i < run.transitions.size(); ++i) {
    const NodeId& x = run.transitions[i].active;
    Timestamp s = counter[x]++;
    ci.loc.push_back(s);
    ci.glob[{x, s}] = i;
  }
  return ci;
}

ArrivalMap arrival(const RunPrefix& run) {
  ArrivalMap out;
  for (std::size_t k = 0; k < run.transitions.size(); ++k) {
    const TransitionRecord& tr = run.transitions[k];
    for (const TaggedMessage& msg : tr.delivered)
      out.at[{msg.tag, tr.active, msg.fact}] = k;
  }
  if (!run.transitions.empty()) {
    const Configuration& last = run.transitions.back().target;
    for (const auto& [node, buf] : last.buffer)
      for (const TaggedMessage& msg : buf)
        out.pending.emplace_back(msg.tag, node, msg.fact);
  }
  return out;
}

Instance trace(const RunPrefix& run) {
  ClockIndex ci = clocks(run);
  Instance out;
  for (std::size_t i = 0; i < run.transitions.size(); ++i) {
    const TransitionRecord& tr = run.transitions[i];
    tr.deductive.for_each([&](const Fact& f) {
      Fact lifted{f.pred, {Value::sym(tr.active), Value::ts(ci.loc[i])}};
      lifted.args.insert(lifted.args.end(), f.args.begin(), f.args.end());
      out.insert(std::move(lifted));
    });
  }
  return out;
}

HappensBefore happens_before(const RunPrefix& run) {
  ClockIndex ci = clocks(run);
  ArrivalMap arr = arrival(run);

  // Steps actually performed by the run.
  std::map<NodeId, Timestamp> last_step;
  for (std::size_t i = 0; i < run.transitions.size(); ++i) {
    const NodeId& x = run.transitions[i].active;
    auto [it, fresh] = last_step.emplace(x, ci.loc[i]);
    if (!fresh) it->second = std::max(it->second, ci.loc[i]);
  }

  HappensBefore hb;
  std::vector<NodeStep> domain;
  for (const auto& [x, last] : last_step)
    for (Timestamp s = 0; s <= last; ++s) domain.emplace_back(x, s);

  for (const auto& [x, last] : last_step)
    for (Timestamp s = 0; s + 1 <= last; ++s)
      hb.edges[{{x, s}, {x, s + 1}}] |= kLocalEdge;

  for (const auto& [key, k] : arr.at) {
    auto [i, y, f] = key;
    NodeStep from{run.transitions[i].active, ci.loc[i]};
    NodeStep to{y, ci.loc[k]};
    hb.edges[{from, to}] |= kMessageEdge;
  }

  // Reachability over the base edges, then label composed pairs transitive.
  std::map<NodeStep, std::size_t> index;
  for (std::size_t i = 0; i < domain.size(); ++i) index[domain[i]] = i;
  std::size_t n = domain.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [edge, mask] : hb.edges)
    reach[index.at(edge.first)][index.at(edge.second)] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t a = 0; a < n; ++a) {
      if (!reach[a][k]) continue;
      for (std::size_t c = 0; c < n; ++c)
        if (reach[k][c]) reach[a][c] = true;
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c) {
      if (!reach[a][c]) continue;
      for (std::size_t b = 0; b < n; ++b)
        if (reach[a][b] && reach[b][c]) {
          hb.edges[{domain[a], domain[c]}] |= kTransitiveEdge;
          break;
        }
    }
  return hb;
}

}  // namespace dedalus
