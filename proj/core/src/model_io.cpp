#include "dedalus/model_io.hpp"

#include "json.hpp"

namespace dedalus {

namespace {

using nlohmann::json;

json value_to_json(const Value& v) {
  if (v.is_symbol()) return v.symbol();
  return v.timestamp();
}

Value value_from_json(const json& j) {
  if (j.is_string()) return Value::sym(j.get<std::string>());
  if (j.is_number_unsigned()) return Value::ts(j.get<Timestamp>());
  throw ModelIoError("fact arguments must be strings or nonnegative numbers");
}

json fact_to_json(const Fact& f) {
  json entry = json::array();
  entry.push_back(f.pred);
  for (const Value& v : f.args) entry.push_back(value_to_json(v));
  return entry;
}

json instance_to_array(const Instance& i) {
  json list = json::array();
  for (const Fact& f : i.facts()) list.push_back(fact_to_json(f));
  return list;
}

Instance instance_from_array(const json& list) {
  if (!list.is_array()) throw ModelIoError("\"facts\" must be an array");
  Instance out;
  for (const auto& entry : list) {
    if (!entry.is_array() || entry.empty() || !entry[0].is_string())
      throw ModelIoError("each fact must be an array starting with the relation name");
    Fact f{entry[0].get<std::string>(), {}};
    for (std::size_t k = 1; k < entry.size(); ++k)
      f.args.push_back(value_from_json(entry[k]));
    out.insert(std::move(f));
  }
  return out;
}

json message_to_json(const TaggedMessage& m) {
  return json{{"tag", m.tag}, {"fact", fact_to_json(m.fact)}};
}

std::string dump(const json& doc) { return doc.dump(1) + "\n"; }

}  // namespace

std::string facts_to_json(const Instance& i) { return dump(instance_to_array(i)); }

Instance facts_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelIoError(std::string("invalid JSON: ") + e.what());
  }
  return instance_from_array(doc);
}

std::string model_to_json(const ModelCandidate& m) {
  json doc;
  doc["t_ground"] = m.window.t_ground;
  doc["t_check"] = m.window.t_check;
  doc["facts"] = instance_to_array(m.facts);
  return dump(doc);
}

ModelCandidate model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelIoError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("t_ground") || !doc.contains("t_check") ||
      !doc.contains("facts"))
    throw ModelIoError("expected an object with t_ground, t_check and facts");
  if (!doc["t_ground"].is_number_unsigned() || !doc["t_check"].is_number_unsigned())
    throw ModelIoError("t_ground and t_check must be nonnegative numbers");

  ModelCandidate m;
  m.window.t_ground = doc["t_ground"].get<Timestamp>();
  m.window.t_check = doc["t_check"].get<Timestamp>();
  if (m.window.t_check > m.window.t_ground)
    throw ModelIoError("t_check must not exceed t_ground");
  m.facts = instance_from_array(doc["facts"]);
  m.origin = ModelOrigin::External;
  return m;
}

std::string run_to_json(const RunPrefix& run) {
  json doc;
  doc["nodes"] = json::array();
  for (const NodeId& n : run.input.network.nodes) doc["nodes"].push_back(n);
  doc["transitions"] = json::array();
  for (const TransitionRecord& tr : run.transitions) {
    json t;
    t["tag"] = tr.tag;
    t["active"] = tr.active;
    t["delivered"] = json::array();
    for (const TaggedMessage& m : tr.delivered) t["delivered"].push_back(message_to_json(m));
    t["deductive"] = instance_to_array(tr.deductive);
    t["sent"] = json::object();
    for (const auto& [addr, msgs] : tr.sent) {
      json list = json::array();
      for (const TaggedMessage& m : msgs) list.push_back(message_to_json(m));
      t["sent"][addr] = list;
    }
    t["state"] = json::object();
    for (const auto& [node, inst] : tr.target.state)
      t["state"][node] = instance_to_array(inst);
    doc["transitions"].push_back(t);
  }
  return dump(doc);
}

std::string report_to_json(const Report& rep) {
  json doc;
  doc["t_ground"] = rep.window.t_ground;
  doc["t_check"] = rep.window.t_check;
  doc["simulated"] = rep.simulated;
  doc["model_built"] = rep.model_built;
  doc["model_accepted"] = rep.stability.accepted;
  doc["model_missing"] = instance_to_array(rep.stability.missing);
  doc["model_extra"] = instance_to_array(rep.stability.extra);
  doc["run_rebuilt"] = rep.run_rebuilt;
  doc["model_trace_equal"] = rep.model_trace_equal;
  doc["roundtrip_trace_equal"] = rep.roundtrip_trace_equal;
  if (!rep.error.empty()) doc["error"] = rep.error;
  doc["pass"] = rep.pass;
  return dump(doc);
}

}  // namespace dedalus
