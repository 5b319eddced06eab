#pragma once

// JSON instance files and trace serialization (nlohmann::json).

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"
#include "stocpack/model.hpp"
#include "stocpack/scheduler.hpp"

namespace stocpack {

using Json = nlohmann::ordered_json;
using Instance = std::variant<StocKInstance, MABInstance>;

namespace detail {

template <class T>
T field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInstance(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInstance(where + ": field '" + key + "' has the wrong type");
  }
}

inline ArmShape parse_shape(const std::string& s, const std::string& where) {
  if (s == "tree") return ArmShape::tree;
  if (s == "layered-dag") return ArmShape::layered_dag;
  if (s == "graph") return ArmShape::graph;
  throw InvalidInstance(where + ": unknown shape '" + s + "'");
}

inline const char* shape_name(ArmShape s) {
  switch (s) {
    case ArmShape::tree: return "tree";
    case ArmShape::layered_dag: return "layered-dag";
    case ArmShape::graph: return "graph";
  }
  return "tree";
}

}  // namespace detail

inline StocKInstance stock_from_json(const Json& j) {
  StocKInstance inst;
  inst.budget = detail::field<int>(j, "budget", "instance");
  const Json items = detail::field<Json>(j, "items", "instance");
  if (!items.is_array()) throw InvalidInstance("instance: 'items' must be an array");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string where = "item " + std::to_string(i);
    if (!items[i].is_array()) throw InvalidInstance(where + ": must be an array of outcomes");
    ItemDist it;
    for (const auto& o : items[i]) {
      const int s = detail::field<int>(o, "size", where);
      if (it.probs.count(s)) throw InvalidInstance(where + ": size " + std::to_string(s) + " listed twice");
      it.probs[s] = detail::field<double>(o, "prob", where);
      if (o.contains("reward")) it.rewards[s] = detail::field<double>(o, "reward", where);
    }
    inst.items.push_back(std::move(it));
  }
  return inst;
}

inline Json to_json(const StocKInstance& inst) {
  Json items = Json::array();
  for (const auto& it : inst.items) {
    Json arr = Json::array();
    for (auto [s, p] : it.probs) arr.push_back({{"size", s}, {"prob", p}, {"reward", it.reward(s)}});
    items.push_back(std::move(arr));
  }
  return {{"kind", "stock"}, {"budget", inst.budget}, {"items", std::move(items)}};
}

inline MABInstance mab_from_json(const Json& j) {
  MABInstance inst;
  inst.budget = detail::field<int>(j, "budget", "instance");
  if (j.contains("exploitBudget") && !j.at("exploitBudget").is_null())
    inst.exploit_budget = detail::field<int>(j, "exploitBudget", "instance");
  const Json arms = detail::field<Json>(j, "arms", "instance");
  if (!arms.is_array()) throw InvalidInstance("instance: 'arms' must be an array");
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const std::string where = "arm " + std::to_string(a);
    const Json& ja = arms[a];
    Arm arm;
    arm.states = detail::field<std::vector<std::string>>(ja, "states", where);
    arm.root = detail::field<std::string>(ja, "root", where);
    arm.shape = ja.contains("shape") ? detail::parse_shape(detail::field<std::string>(ja, "shape", where), where)
                                     : ArmShape::tree;
    if (ja.contains("edges"))
      for (const auto& e : ja.at("edges"))
        arm.edges.push_back({detail::field<std::string>(e, "from", where), detail::field<std::string>(e, "to", where),
                             detail::field<double>(e, "p", where)});
    if (ja.contains("rewards")) {
      if (!ja.at("rewards").is_object()) throw InvalidInstance(where + ": 'rewards' must be an object");
      for (const auto& [k, v] : ja.at("rewards").items()) {
        if (!v.is_number()) throw InvalidInstance(where + ": reward of '" + k + "' is not a number");
        arm.rewards[k] = v.get<double>();
      }
    }
    inst.arms.push_back(std::move(arm));
  }
  return inst;
}

inline Json to_json(const MABInstance& inst) {
  Json arms = Json::array();
  for (const auto& a : inst.arms) {
    Json edges = Json::array();
    for (const auto& e : a.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"p", e.p}});
    Json rewards = Json::object();
    for (const auto& [k, v] : a.rewards) rewards[k] = v;
    arms.push_back({{"shape", detail::shape_name(a.shape)},
                    {"root", a.root},
                    {"states", a.states},
                    {"edges", std::move(edges)},
                    {"rewards", std::move(rewards)}});
  }
  Json j = {{"kind", "mab"}, {"budget", inst.budget}};
  if (inst.exploit_budget) j["exploitBudget"] = *inst.exploit_budget;
  j["arms"] = std::move(arms);
  return j;
}

inline Instance instance_from_json(const Json& j) {
  const auto kind = detail::field<std::string>(j, "kind", "instance");
  if (kind == "stock") return stock_from_json(j);
  if (kind == "mab") return mab_from_json(j);
  throw InvalidInstance("instance: unknown kind '" + kind + "'");
}

inline Instance parse_instance(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInstance(std::string("malformed JSON: ") + e.what());
  }
  return instance_from_json(j);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

inline std::string dump_instance(const Instance& inst) {
  return std::visit([](const auto& x) { return to_json(x).dump(2); }, inst) + "\n";
}

inline std::vector<std::string> validate(const Instance& inst) {
  if (const auto* s = std::get_if<StocKInstance>(&inst)) return validate_stock(*s);
  return validate_mab(std::get<MABInstance>(inst));
}

// ------------------------------------------------------------------ traces

inline Json to_json(const Play& p) {
  Json j = {{"i", p.index},
            {"slot", p.slot},
            {"arm", p.arm},
            {"state", p.state},
            {"action", p.action == PlayAction::pull ? "pull" : "exploit"}};
  if (!p.next.empty()) j["next"] = p.next;
  j["credited"] = p.credited;
  j["reward"] = p.reward;
  return j;
}

/// One header line with the sampled strategy per arm, one line per play,
/// then a summary line.
inline void write_trace_jsonl(const PlayTrace& tr, std::ostream& os, long trial = 0) {
  os << Json{{"trial", trial}, {"sampled", tr.sampled}}.dump() << '\n';
  for (const auto& p : tr.plays) os << to_json(p).dump() << '\n';
  os << Json{{"pulls", tr.pulls}, {"exploits", tr.exploits}, {"credited_reward", tr.credited_reward}}.dump() << '\n';
}

inline std::string trace_jsonl(const PlayTrace& tr, long trial = 0) {
  std::ostringstream os;
  write_trace_jsonl(tr, os, trial);
  return os.str();
}

}  // namespace stocpack
