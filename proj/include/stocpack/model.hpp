#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stocpack/common.hpp"

namespace stocpack {

// ---------------------------------------------------------------- knapsack

struct ItemDist {
  std::map<int, double> probs;    // size -> pi
  std::map<int, double> rewards;  // size -> R

  double prob(int s) const {
    auto it = probs.find(s);
    return it == probs.end() ? 0.0 : it->second;
  }
  double reward(int s) const {
    auto it = rewards.find(s);
    return it == rewards.end() ? 0.0 : it->second;
  }
  int max_size() const { return probs.empty() ? 0 : probs.rbegin()->first; }
};

struct StocKInstance {
  int budget = 0;
  std::vector<ItemDist> items;
};

namespace detail {
inline std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
}  // namespace detail

inline std::vector<std::string> validate_stock(const StocKInstance& inst) {
  std::vector<std::string> out;
  if (inst.budget < 1) out.push_back("budget must be a positive integer");
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    const auto& it = inst.items[i];
    const std::string tag = "item " + std::to_string(i) + ": ";
    double mass = 0.0;
    for (auto [s, p] : it.probs) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        out.push_back(tag + "probability at size " + std::to_string(s) + " outside [0,1]");
        continue;
      }
      mass += p;
      if (s < 0) out.push_back(tag + "negative size " + std::to_string(s));
      if (s == 0 && p > 0.0) out.push_back(tag + "size 0 has positive mass");
      if (s > inst.budget && p > 0.0 && inst.budget >= 1)
        out.push_back(tag + "size " + std::to_string(s) + " exceeds budget " +
                      std::to_string(inst.budget));
    }
    if (std::abs(mass - 1.0) > tol::prob_sum)
      out.push_back(tag + "probability mass " + detail::fmt_num(mass) + " ≠ 1");
    for (auto [s, r] : it.rewards) {
      if (!it.probs.count(s))
        out.push_back(tag + "reward at size " + std::to_string(s) + " has no probability entry");
      if (!std::isfinite(r) || r < 0.0)
        out.push_back(tag + "reward at size " + std::to_string(s) + " is negative or non-finite");
    }
  }
  return out;
}

inline void require_valid(const StocKInstance& inst) {
  auto v = validate_stock(inst);
  if (!v.empty()) throw InvalidInstance(v.front());
}

// ------------------------------------------------------------------ bandits

using StateId = std::string;

enum class ArmShape { tree, layered_dag, graph };

inline const char* to_string(ArmShape s) {
  switch (s) {
    case ArmShape::tree: return "tree";
    case ArmShape::layered_dag: return "layered-dag";
    case ArmShape::graph: return "graph";
  }
  return "?";
}

struct Edge {
  StateId from;
  StateId to;
  double p = 0.0;
};

struct Arm {
  std::vector<StateId> states;
  StateId root;
  std::vector<Edge> edges;
  std::map<StateId, double> rewards;
  ArmShape shape = ArmShape::tree;

  double reward(const StateId& u) const {
    auto it = rewards.find(u);
    return it == rewards.end() ? 0.0 : it->second;
  }
};

struct MABInstance {
  int budget = 0;
  std::optional<int> exploit_budget;
  std::vector<Arm> arms;
};

// Index-based view of an arm used by the algorithms. Children keep the
// order in which edges were declared; that order fixes rng consumption.
struct CompiledArm {
  std::vector<StateId> ids;
  std::unordered_map<StateId, int> index;
  int root = 0;
  std::vector<std::vector<std::pair<int, double>>> children;
  std::vector<std::vector<std::pair<int, double>>> in_edges;
  std::vector<int> depth;  // BFS distance from root; -1 if unreachable
  std::vector<int> bfs;    // reachable states in BFS order
  std::vector<double> reward;
  std::vector<double> path_prob;  // product of edge probabilities (trees)

  int size() const { return static_cast<int>(ids.size()); }
  bool is_leaf(int u) const { return children[u].empty(); }
  // Parent in a tree arm (first in-edge); -1 for the root.
  int parent(int u) const { return in_edges[u].empty() ? -1 : in_edges[u].front().first; }
  double edge_prob(int u, int v) const {
    for (auto [c, p] : children[u])
      if (c == v) return p;
    return 0.0;
  }
};

inline CompiledArm compile_arm(const Arm& arm) {
  CompiledArm c;
  c.ids = arm.states;
  for (int k = 0; k < static_cast<int>(arm.states.size()); ++k) c.index.emplace(arm.states[k], k);
  auto find = [&](const StateId& s) {
    auto it = c.index.find(s);
    if (it == c.index.end()) throw InvalidInstance("unknown state '" + s + "'");
    return it->second;
  };
  const int n = c.size();
  c.root = find(arm.root);
  c.children.assign(n, {});
  c.in_edges.assign(n, {});
  for (const auto& e : arm.edges) {
    const int u = find(e.from), v = find(e.to);
    c.children[u].emplace_back(v, e.p);
    c.in_edges[v].emplace_back(u, e.p);
  }
  c.reward.resize(n);
  for (int k = 0; k < n; ++k) c.reward[k] = arm.reward(c.ids[k]);
  c.depth.assign(n, -1);
  c.path_prob.assign(n, 0.0);
  std::deque<int> q{c.root};
  c.depth[c.root] = 0;
  c.path_prob[c.root] = 1.0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    c.bfs.push_back(u);
    for (auto [v, p] : c.children[u]) {
      if (c.depth[v] >= 0) continue;
      c.depth[v] = c.depth[u] + 1;
      c.path_prob[v] = c.path_prob[u] * p;
      q.push_back(v);
    }
  }
  return c;
}

inline std::vector<CompiledArm> compile_arms(const MABInstance& inst) {
  std::vector<CompiledArm> out;
  out.reserve(inst.arms.size());
  for (const auto& a : inst.arms) out.push_back(compile_arm(a));
  return out;
}

namespace detail {

inline bool has_cycle(const CompiledArm& c) {
  const int n = c.size();
  std::vector<int> indeg(n, 0);
  for (int u = 0; u < n; ++u)
    for (auto [v, p] : c.children[u]) ++indeg[v];
  std::vector<int> stack;
  for (int u = 0; u < n; ++u)
    if (indeg[u] == 0) stack.push_back(u);
  int seen = 0;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    ++seen;
    for (auto [v, p] : c.children[u])
      if (--indeg[v] == 0) stack.push_back(v);
  }
  return seen != n;
}

inline void validate_arm(const Arm& arm, std::size_t ai, std::vector<std::string>& out) {
  const std::string tag = "arm " + std::to_string(ai) + ": ";
  std::set<StateId> ids;
  for (const auto& s : arm.states)
    if (!ids.insert(s).second) out.push_back(tag + "duplicate state '" + s + "'");
  if (!ids.count(arm.root)) {
    out.push_back(tag + "root '" + arm.root + "' is not a declared state");
    return;
  }
  bool endpoints_ok = true;
  std::map<StateId, double> out_sum;
  for (const auto& e : arm.edges) {
    if (!ids.count(e.from) || !ids.count(e.to)) {
      out.push_back(tag + "edge " + e.from + "->" + e.to + " references an unknown state");
      endpoints_ok = false;
      continue;
    }
    if (!std::isfinite(e.p) || e.p < 0.0 || e.p > 1.0)
      out.push_back(tag + "edge " + e.from + "->" + e.to + " probability outside [0,1]");
    out_sum[e.from] += e.p;
  }
  for (auto [u, s] : out_sum)
    if (std::abs(s - 1.0) > tol::prob_sum)
      out.push_back(tag + "state '" + u + "' out-probability sum " + fmt_num(s) + " ≠ 1");
  for (auto [u, r] : arm.rewards) {
    if (!ids.count(u)) out.push_back(tag + "reward for unknown state '" + u + "'");
    if (!std::isfinite(r) || r < 0.0)
      out.push_back(tag + "reward of '" + u + "' is negative or non-finite");
  }
  if (!endpoints_ok || ids.size() != arm.states.size()) return;

  const CompiledArm c = compile_arm(arm);
  if (arm.shape == ArmShape::tree) {
    for (int u = 0; u < c.size(); ++u) {
      const auto indeg = c.in_edges[u].size();
      if (u == c.root && indeg != 0) out.push_back(tag + "tree root has an incoming edge");
      if (u != c.root && indeg != 1)
        out.push_back(tag + "state '" + c.ids[u] + "' has " + std::to_string(indeg) +
                      " incoming edges in a tree");
      if (c.depth[u] < 0) out.push_back(tag + "state '" + c.ids[u] + "' unreachable from root");
    }
    if (has_cycle(c)) out.push_back(tag + "tree contains a cycle");
  } else if (arm.shape == ArmShape::layered_dag) {
    if (has_cycle(c)) {
      out.push_back(tag + "layered DAG contains a cycle");
      return;
    }
    if (!c.in_edges[c.root].empty()) out.push_back(tag + "root has an incoming edge");
    for (int u = 0; u < c.size(); ++u) {
      if (c.depth[u] < 0) {
        out.push_back(tag + "state '" + c.ids[u] + "' unreachable from root");
        continue;
      }
      for (auto [v, p] : c.children[u])
        if (c.depth[v] != c.depth[u] + 1)
          out.push_back(tag + "edge " + c.ids[u] + "->" + c.ids[v] + " skips a layer");
    }
  }
}

}  // namespace detail

inline std::vector<std::string> validate_mab(const MABInstance& inst) {
  std::vector<std::string> out;
  if (inst.budget < 1) out.push_back("budget must be a positive integer");
  if (inst.exploit_budget && *inst.exploit_budget < 0)
    out.push_back("exploit budget must be non-negative");
  std::map<StateId, std::size_t> owner;
  for (std::size_t a = 0; a < inst.arms.size(); ++a) {
    detail::validate_arm(inst.arms[a], a, out);
    std::set<StateId> mine(inst.arms[a].states.begin(), inst.arms[a].states.end());
    for (const auto& s : mine) {
      auto [it, fresh] = owner.emplace(s, a);
      if (!fresh)
        out.push_back("state id '" + s + "' shared by arms " + std::to_string(it->second) +
                      " and " + std::to_string(a));
    }
  }
  return out;
}

inline void require_valid(const MABInstance& inst) {
  auto v = validate_mab(inst);
  if (!v.empty()) throw InvalidInstance(v.front());
}

// Unrolls an arbitrary transition graph into B layers. State (v,t) is named
// "v@t"; only pairs reachable from (root,1) are kept.
inline Arm layer_dag(const Arm& arm, int budget) {
  if (budget <= 0) throw std::invalid_argument("layer_dag: budget must be positive");
  const CompiledArm c = compile_arm(arm);
  auto name = [&](int u, int t) { return c.ids[u] + "@" + std::to_string(t); };
  Arm out;
  out.shape = ArmShape::layered_dag;
  out.root = name(c.root, 1);
  std::vector<int> layer{c.root};
  for (int t = 1; t <= budget && !layer.empty(); ++t) {
    std::vector<int> next;
    std::vector<char> in_next(c.size(), 0);
    for (int u : layer) {
      out.states.push_back(name(u, t));
      if (c.reward[u] != 0.0 || arm.rewards.count(c.ids[u])) out.rewards[name(u, t)] = c.reward[u];
      if (t == budget) continue;
      for (auto [v, p] : c.children[u]) {
        if (p <= 0.0) continue;
        out.edges.push_back({name(u, t), name(v, t + 1), p});
        if (!in_next[v]) {
          in_next[v] = 1;
          next.push_back(v);
        }
      }
    }
    layer = std::move(next);
  }
  // A layer-B state keeps no out-edges, so it is a leaf of the layered arm.
  return out;
}

}  // namespace stocpack
