#pragma once

// Peel an LP solution of one arm into a convex combination of
// strategy forests (trees), strategy DAGs (layered arms) or pull/exploit
// forests (budgeted exploitation).

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "stocpack/mab_lp.hpp"

namespace stocpack {

struct StrategyForest {
  int arm = 0;
  int peel = 0;
  std::vector<int> time;     // per state; kInfTime when absent
  std::vector<double> prob;  // per state
  std::vector<double> pull, exploit;  // filled for exploit forests only

  bool is_exploit_forest() const { return !exploit.empty(); }
  bool present(int u) const { return time[u] != kInfTime; }
};

struct StrategyDag {
  struct Node {
    int state = 0;
    int time = 0;
    double prob = 0.0;
    std::vector<int> succ;  // successor time per out-edge of `state`; kInfTime if none
  };
  int arm = 0;
  int peel = 0;
  std::vector<Node> nodes;  // visit order: depth, then time, then state
  std::map<std::pair<int, int>, int> lookup;

  int find(int state, int time) const {
    auto it = lookup.find({state, time});
    return it == lookup.end() ? -1 : it->second;
  }
  const Node& root() const { return nodes.front(); }
  bool empty() const { return nodes.empty(); }
};

/// Residual LP values of one arm, indexed [state][t] with t in [1, B].
struct ArmResidual {
  std::vector<std::vector<double>> z, w, x;
};

using PeelObserver = std::function<void(const ArmResidual&)>;

inline ArmResidual extract_residual(const LPSolution& sol, const MabLPIndex& idx, int arm) {
  ArmResidual r;
  const int ns = idx.arms[arm].size(), B = idx.budget;
  auto grab = [&](const std::vector<std::vector<int>>& vars) {
    std::vector<std::vector<double>> out(ns, std::vector<double>(B + 1, 0.0));
    for (int u = 0; u < ns; ++u)
      for (int t = 1; t <= B; ++t) {
        const double v = sol.x[vars[u][t]];
        out[u][t] = v < tol::mass ? 0.0 : v;
      }
    return out;
  };
  r.z = grab(idx.z[arm]);
  r.w = grab(idx.w[arm]);
  if (idx.has_exploit()) r.x = grab(idx.x[arm]);
  return r;
}

/// Writes a residual back into a full LP value vector (other arms untouched).
inline void write_residual(std::vector<double>& values, const MabLPIndex& idx, int arm, const ArmResidual& r) {
  const int ns = idx.arms[arm].size(), B = idx.budget;
  for (int u = 0; u < ns; ++u)
    for (int t = 1; t <= B; ++t) {
      values[idx.z[arm][u][t]] = r.z[u][t];
      if (u != idx.arms[arm].root || t != 1) values[idx.w[arm][u][t]] = r.w[u][t];
      if (idx.has_exploit()) values[idx.x[arm][u][t]] = r.x[u][t];
    }
}

namespace detail {

inline void take(double& cell, double amount) {
  cell -= amount;
  if (cell < -1e-6) throw std::runtime_error("decomposition: residual went negative (infeasible input)");
  if (cell < tol::mass) cell = 0.0;
}

inline int earliest_after(const std::vector<double>& row, int after, int B) {
  for (int t = std::max(after + 1, 1); t <= B; ++t)
    if (row[t] > 0.0) return t;
  return kInfTime;
}

// Shared tree / exploit peeling loop.
inline std::vector<StrategyForest> peel_forests(ArmResidual r, const CompiledArm& arm, int arm_index, int B,
                                                bool exploit_mode, const PeelObserver& observe) {
  const int ns = arm.size();
  std::vector<StrategyForest> out;
  const long cap = (exploit_mode ? 2L : 1L) * B * ns;
  for (;;) {
    std::vector<int> time(ns, kInfTime);
    std::vector<char> is_exploit(ns, 0);
    for (int u : arm.bfs) {
      int after = 0;
      if (u != arm.root) {
        const int par = arm.parent(u);
        if (time[par] == kInfTime || is_exploit[par]) continue;
        after = time[par];
      }
      const int tz = earliest_after(r.z[u], after, B);
      const int tx = exploit_mode ? earliest_after(r.x[u], after, B) : kInfTime;
      time[u] = std::min(tz, tx);
      is_exploit[u] = tx != kInfTime && tx <= tz;
    }
    if (time[arm.root] == kInfTime) break;
    if (static_cast<long>(out.size()) >= cap) throw std::logic_error("decomposition: peel count bound exceeded");

    double eps = kInf;
    int arg = -1;
    for (int u : arm.bfs) {
      if (time[u] == kInfTime || arm.path_prob[u] <= 0.0) continue;
      const double cell = is_exploit[u] ? r.x[u][time[u]] : r.z[u][time[u]];
      const double e = cell / arm.path_prob[u];
      if (e < eps) {
        eps = e;
        arg = u;
      }
    }
    StrategyForest f;
    f.arm = arm_index;
    f.peel = static_cast<int>(out.size());
    f.time = time;
    f.prob.assign(ns, 0.0);
    if (exploit_mode) {
      f.pull.assign(ns, 0.0);
      f.exploit.assign(ns, 0.0);
    }
    for (int u : arm.bfs) {
      if (time[u] == kInfTime) continue;
      const double pr = eps * arm.path_prob[u];
      f.prob[u] = pr;
      if (is_exploit[u]) {
        f.exploit[u] = pr;
        take(r.x[u][time[u]], pr);
        continue;
      }
      if (exploit_mode) f.pull[u] = pr;
      take(r.z[u][time[u]], pr);
      if (time[u] < B)
        for (auto [v, p] : arm.children[u]) take(r.w[v][time[u] + 1], pr * p);
    }
    if (is_exploit[arg])
      r.x[arg][time[arg]] = 0.0;
    else
      r.z[arg][time[arg]] = 0.0;
    out.push_back(std::move(f));
    if (observe) observe(r);
  }
  return out;
}

}  // namespace detail

inline std::vector<StrategyForest> decompose_tree(const LPSolution& sol, const MabLPIndex& idx, int arm,
                                                  const PeelObserver& observe = {}) {
  return detail::peel_forests(extract_residual(sol, idx, arm), idx.arms[arm], arm, idx.budget, false, observe);
}

inline std::vector<StrategyForest> decompose_exploit(const LPSolution& sol, const MabLPIndex& idx, int arm,
                                                     const PeelObserver& observe = {}) {
  if (!idx.has_exploit()) throw std::invalid_argument("decompose_exploit needs an LP4 index");
  return detail::peel_forests(extract_residual(sol, idx, arm), idx.arms[arm], arm, idx.budget, true, observe);
}

/// One PeelStrat pass. Node prob holds peelProb; an empty dag means the
/// root has no residual mass left.
inline StrategyDag peel_strat(const ArmResidual& r, const CompiledArm& arm, int B) {
  StrategyDag dag;
  const int t0 = detail::earliest_after(r.z[arm.root], 0, B);
  if (t0 == kInfTime) return dag;
  std::map<std::pair<int, int>, double> peel;
  std::set<std::tuple<int, int, int>> frontier;  // (depth, time, state)
  peel[{arm.root, t0}] = 1.0;
  frontier.emplace(0, t0, arm.root);
  while (!frontier.empty()) {
    auto [d, t, u] = *frontier.begin();
    frontier.erase(frontier.begin());
    StrategyDag::Node node{u, t, peel[{u, t}], {}};
    for (auto [v, p] : arm.children[u]) {
      const int tv = p > 0.0 ? detail::earliest_after(r.z[v], t, B) : kInfTime;
      node.succ.push_back(tv);
      if (tv == kInfTime) continue;
      peel[{v, tv}] += node.prob * p;
      frontier.emplace(arm.depth[v], tv, v);
    }
    dag.lookup[{u, t}] = static_cast<int>(dag.nodes.size());
    dag.nodes.push_back(std::move(node));
  }
  return dag;
}

inline std::vector<StrategyDag> decompose_dag(const LPSolution& sol, const MabLPIndex& idx, int arm_index,
                                              const PeelObserver& observe = {}) {
  const auto& arm = idx.arms[arm_index];
  const int B = idx.budget;
  ArmResidual r = extract_residual(sol, idx, arm_index);
  std::vector<StrategyDag> out;
  const long cap = static_cast<long>(B) * B * arm.size();
  for (;;) {
    StrategyDag dag = peel_strat(r, arm, B);
    if (dag.empty()) break;
    if (static_cast<long>(out.size()) >= cap) throw std::logic_error("decomposition: peel count bound exceeded");
    double eps = kInf;
    int arg = -1;
    for (int k = 0; k < static_cast<int>(dag.nodes.size()); ++k) {
      const auto& n = dag.nodes[k];
      if (n.prob == 0.0) continue;
      const double e = r.z[n.state][n.time] / n.prob;
      if (e < eps) {
        eps = e;
        arg = k;
      }
    }
    for (auto& n : dag.nodes) {
      n.prob *= eps;
      detail::take(r.z[n.state][n.time], n.prob);
      if (n.time < B)
        for (auto [v, p] : arm.children[n.state]) detail::take(r.w[v][n.time + 1], n.prob * p);
    }
    r.z[dag.nodes[arg].state][dag.nodes[arg].time] = 0.0;
    dag.arm = arm_index;
    dag.peel = static_cast<int>(out.size());
    out.push_back(std::move(dag));
    if (observe) observe(r);
  }
  return out;
}

// ------------------------------------------------------------------ audits

/// Sum over forests of prob at (u, time(u)); with exploit = true only the
/// exploit part, otherwise the pull part.
inline std::vector<std::vector<double>> forest_marginals(const std::vector<StrategyForest>& forests, int ns, int B,
                                                         bool exploit = false) {
  std::vector<std::vector<double>> m(ns, std::vector<double>(B + 1, 0.0));
  for (const auto& f : forests)
    for (int u = 0; u < ns; ++u) {
      if (!f.present(u)) continue;
      double v = f.prob[u];
      if (f.is_exploit_forest()) v = exploit ? f.exploit[u] : f.pull[u];
      else if (exploit) v = 0.0;
      m[u][f.time[u]] += v;
    }
  return m;
}

inline std::vector<std::vector<double>> dag_marginals(const std::vector<StrategyDag>& dags, int ns, int B) {
  std::vector<std::vector<double>> m(ns, std::vector<double>(B + 1, 0.0));
  for (const auto& d : dags)
    for (const auto& n : d.nodes) m[n.state][n.time] += n.prob;
  return m;
}

namespace detail {
inline bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }
}  // namespace detail

/// Type invariants of a (pull or exploit) strategy forest; empty if all hold.
inline std::vector<std::string> check_forest(const CompiledArm& arm, const StrategyForest& f) {
  std::vector<std::string> bad;
  auto name = [&](int u) { return "state " + arm.ids[u] + ": "; };
  for (int u = 0; u < arm.size(); ++u) {
    if (!f.present(u)) {
      if (f.prob[u] != 0.0) bad.push_back(name(u) + "absent but prob > 0");
      continue;
    }
    if (f.is_exploit_forest()) {
      const bool one = (f.pull[u] == 0.0) != (f.exploit[u] == 0.0);
      if (!one) bad.push_back(name(u) + "needs exactly one of pull/exploit");
      if (f.exploit[u] > 0.0)
        for (auto [v, p] : arm.children[u])
          if (f.present(v)) bad.push_back(name(u) + "exploited state has a present child");
    }
    const int par = arm.parent(u);
    if (par < 0) continue;
    if (!f.present(par)) {
      bad.push_back(name(u) + "present under an absent parent");
      continue;
    }
    if (f.time[u] < f.time[par] + 1) bad.push_back(name(u) + "time not after parent");
    const double parent_mass = f.is_exploit_forest() ? f.pull[par] : f.prob[par];
    if (!detail::close(f.prob[u], parent_mass * arm.edge_prob(par, u)))
      bad.push_back(name(u) + "prob differs from parent prob times edge probability");
  }
  for (int v = 0; v < arm.size(); ++v) {
    double kids = 0.0;
    for (auto [c, p] : arm.children[v]) kids += f.prob[c];
    if (kids > f.prob[v] * (1 + 1e-12) + 1e-15) bad.push_back(name(v) + "preflow violated");
  }
  return bad;
}

inline std::vector<std::string> check_dag(const CompiledArm& arm, const StrategyDag& d) {
  std::vector<std::string> bad;
  std::map<std::pair<int, int>, double> inflow;
  for (const auto& n : d.nodes) {
    if (n.succ.size() != arm.children[n.state].size())
      bad.push_back("node " + arm.ids[n.state] + ": successor count mismatch");
    for (std::size_t k = 0; k < n.succ.size(); ++k) {
      if (n.succ[k] == kInfTime) continue;
      const auto [v, p] = arm.children[n.state][k];
      if (n.succ[k] < n.time + 1) bad.push_back("node " + arm.ids[n.state] + ": successor not after node");
      if (d.find(v, n.succ[k]) < 0) bad.push_back("node " + arm.ids[n.state] + ": successor missing");
      inflow[{v, n.succ[k]}] += n.prob * p;
    }
  }
  for (std::size_t k = 1; k < d.nodes.size(); ++k) {
    const auto& n = d.nodes[k];
    if (!detail::close(n.prob, inflow[{n.state, n.time}]))
      bad.push_back("node " + arm.ids[n.state] + "@" + std::to_string(n.time) + ": prob differs from inflow");
  }
  return bad;
}

}  // namespace stocpack
