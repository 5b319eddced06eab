#pragma once

// Turning peeled strategies into plays: gap filling and the players built on it.

#include <algorithm>
#include <string>
#include <vector>

#include "stocpack/decomposition.hpp"

namespace stocpack {

struct GapFilledForest {
  StrategyForest forest;
  std::vector<int> original_time;
};

/// Topmost node reachable by walking up through time-contiguous parents.
inline int head_of(const CompiledArm& arm, const StrategyForest& f, int u) {
  for (;;) {
    const int par = arm.parent(u);
    if (par < 0 || !f.present(par) || f.time[par] != f.time[u] - 1) return u;
    u = par;
  }
}

/// Nodes reachable from `head` through time-contiguous children.
inline std::vector<int> component_of(const CompiledArm& arm, const StrategyForest& f, int head) {
  std::vector<int> comp{head};
  for (std::size_t k = 0; k < comp.size(); ++k) {
    const int u = comp[k];
    for (auto [v, p] : arm.children[u])
      if (f.present(v) && f.time[v] == f.time[u] + 1) comp.push_back(v);
  }
  return comp;
}

inline std::vector<GapFilledForest> gap_fill(const std::vector<CompiledArm>& arms,
                                             std::vector<StrategyForest> forests, int B) {
  std::stable_sort(forests.begin(), forests.end(), [](const auto& a, const auto& b) {
    return a.arm != b.arm ? a.arm < b.arm : a.peel < b.peel;
  });
  std::vector<GapFilledForest> out;
  for (auto& f : forests) out.push_back({f, f.time});
  for (int tau = B; tau >= 1; --tau) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& g : out) {
        auto& f = g.forest;
        const auto& arm = arms[f.arm];
        for (int v = 0; v < arm.size(); ++v) {
          if (v == arm.root || !f.present(v) || f.time[v] != tau) continue;
          if (head_of(arm, f, v) != v || tau >= 2 * arm.depth[v]) continue;
          const int shift = tau - (f.time[arm.parent(v)] + 1);
          for (int c : component_of(arm, f, v)) f.time[c] -= shift;
          changed = true;
        }
      }
    }
  }
  return out;
}

/// Largest total prob over all forests at any single time.
inline double max_extent(const std::vector<GapFilledForest>& filled, int B) {
  std::vector<double> ext(B + 2, 0.0);
  for (const auto& g : filled)
    for (std::size_t u = 0; u < g.forest.time.size(); ++u)
      if (g.forest.present(int(u)) && g.forest.time[u] <= B) ext[g.forest.time[u]] += g.forest.prob[u];
  return *std::max_element(ext.begin(), ext.end());
}

/// Post-conditions of GapFill that do not depend on the LP.
inline std::vector<std::string> check_gap_filled(const std::vector<CompiledArm>& arms,
                                                 const std::vector<GapFilledForest>& filled) {
  std::vector<std::string> bad;
  for (const auto& g : filled) {
    const auto& f = g.forest;
    const auto& arm = arms[f.arm];
    const std::string tag = "arm " + std::to_string(f.arm) + " peel " + std::to_string(f.peel) + ": ";
    for (int u = 0; u < arm.size(); ++u) {
      if (!f.present(u)) continue;
      if (g.original_time[u] == kInfTime) bad.push_back(tag + "state became present");
      const int par = arm.parent(u);
      if (par >= 0 && f.time[u] < f.time[par] + 1) bad.push_back(tag + arm.ids[u] + " not after parent");
      if (arm.reward[u] > 0.0) {
        const int h = head_of(arm, f, u);
        if (f.time[h] < 2 * arm.depth[h]) bad.push_back(tag + arm.ids[u] + " head starts before 2*depth");
      }
      const int h = head_of(arm, g.forest, u);
      // a node that was a non-head before the fill must still be a non-head
      if (h == u && par >= 0 && f.present(par) && g.original_time[par] == g.original_time[u] - 1)
        bad.push_back(tag + arm.ids[u] + " became a head");
    }
  }
  return bad;
}

// ------------------------------------------------------------------- traces

enum class PlayAction { pull, exploit };

struct Play {
  long index = 0;  // global play counter (pulls and exploits)
  long slot = 0;   // pull slot the play falls in; credit needs slot <= B
  int arm = 0;
  StateId state;
  PlayAction action = PlayAction::pull;
  StateId next;  // realized transition, empty for leaves and exploits
  bool credited = false;
  double reward = 0.0;
};

struct PlayTrace {
  std::vector<Play> plays;
  std::vector<int> sampled;  // chosen peel per arm, -1 if none
  long pulls = 0;
  long exploits = 0;
  double credited_reward = 0.0;
};

namespace detail {

template <class RootMass>
std::vector<int> sample_strategies(int arms, const std::vector<std::vector<int>>& by_arm, RootMass mass, Rng& rng) {
  std::vector<int> sigma(arms, -1);
  for (int a = 0; a < arms; ++a) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (int k : by_arm[a]) {
      cum += mass(k) / 24.0;
      if (u < cum) {
        sigma[a] = k;
        break;
      }
    }
  }
  return sigma;
}

// Edge index drawn from the out-distribution of u; -1 for a leaf.
inline int draw_edge(const CompiledArm& arm, int u, Rng& rng) {
  const auto& ch = arm.children[u];
  if (ch.empty()) return -1;
  const double x = rng.uniform();
  double cum = 0.0;
  int last = -1;
  for (int k = 0; k < static_cast<int>(ch.size()); ++k) {
    if (ch[k].second <= 0.0) continue;
    cum += ch[k].second;
    last = k;
    if (x < cum) return k;
  }
  return last;
}

inline int argmin_arm(const std::vector<int>& times) {
  int best = -1;
  for (int a = 0; a < static_cast<int>(times.size()); ++a)
    if (times[a] != kInfTime && (best < 0 || times[a] < times[best])) best = a;
  return best;
}

template <class Filled>
std::vector<std::vector<int>> group_by_arm(const std::vector<Filled>& items, int arms) {
  std::vector<std::vector<int>> by(arms);
  for (int k = 0; k < static_cast<int>(items.size()); ++k) by.at(items[k].forest.arm).push_back(k);
  return by;
}

inline PlayTrace play_forests(const std::vector<CompiledArm>& arms, const std::vector<GapFilledForest>& filled,
                              int B, std::optional<int> K, Rng& rng) {
  const int na = static_cast<int>(arms.size());
  const auto by_arm = group_by_arm(filled, na);
  PlayTrace tr;
  tr.sampled = sample_strategies(na, by_arm, [&](int k) {
    const auto& f = filled[k].forest;
    return f.prob[arms[f.arm].root];
  }, rng);
  std::vector<int> cur(na, -1), time(na, kInfTime);
  for (int a = 0; a < na; ++a)
    if (tr.sampled[a] >= 0) {
      cur[a] = arms[a].root;
      time[a] = filled[tr.sampled[a]].forest.time[cur[a]];
    }
  for (int a; (a = argmin_arm(time)) >= 0;) {
    const auto& arm = arms[a];
    const auto& f = filled[tr.sampled[a]].forest;
    int tau = time[a];
    while (time[a] != kInfTime && time[a] == tau) {
      const int u = cur[a];
      Play p;
      p.index = tr.pulls + tr.exploits + 1;
      p.arm = a;
      p.state = arm.ids[u];
      if (K && f.exploit[u] > 0.0) {
        ++tr.exploits;
        p.action = PlayAction::exploit;
        p.slot = tr.pulls + 1;
        p.credited = p.slot <= B && tr.exploits <= *K;
        p.reward = p.credited ? arm.reward[u] : 0.0;
        time[a] = kInfTime;
      } else {
        ++tr.pulls;
        p.slot = tr.pulls;
        if (!K) {
          p.credited = p.slot <= B;
          p.reward = p.credited ? arm.reward[u] : 0.0;
        }
        const int e = draw_edge(arm, u, rng);
        if (e < 0) {
          time[a] = kInfTime;
        } else {
          const int v = arm.children[u][e].first;
          p.next = arm.ids[v];
          cur[a] = v;
          time[a] = f.time[v];
        }
      }
      tr.credited_reward += p.reward;
      tr.plays.push_back(std::move(p));
      ++tau;
    }
  }
  return tr;
}

}  // namespace detail

inline PlayTrace alg_mab(const std::vector<CompiledArm>& arms, const std::vector<GapFilledForest>& filled, int B,
                         Rng& rng) {
  return detail::play_forests(arms, filled, B, std::nullopt, rng);
}

inline PlayTrace alg_mab_exploit(const std::vector<CompiledArm>& arms, const std::vector<GapFilledForest>& filled,
                                 int B, int K, Rng& rng) {
  return detail::play_forests(arms, filled, B, K, rng);
}

/// ImplicitPlay: plays strategy DAGs directly, doing GapFill's advances on
/// the fly through the 2*depth > time test.
inline PlayTrace implicit_play(const std::vector<CompiledArm>& arms, const std::vector<StrategyDag>& dags, int B,
                               Rng& rng) {
  const int na = static_cast<int>(arms.size());
  std::vector<std::vector<int>> by_arm(na);
  for (int k = 0; k < static_cast<int>(dags.size()); ++k) by_arm.at(dags[k].arm).push_back(k);
  PlayTrace tr;
  tr.sampled = detail::sample_strategies(na, by_arm, [&](int k) { return dags[k].root().prob; }, rng);
  std::vector<int> cur(na, -1), time(na, kInfTime);
  for (int a = 0; a < na; ++a)
    if (tr.sampled[a] >= 0) {
      cur[a] = 0;
      time[a] = dags[tr.sampled[a]].root().time;
    }
  for (int a; (a = detail::argmin_arm(time)) >= 0;) {
    const auto& arm = arms[a];
    const auto& dag = dags[tr.sampled[a]];
    int tau = time[a];
    while (time[a] != kInfTime &&
           (time[a] == tau || 2 * arm.depth[dag.nodes[cur[a]].state] > time[a])) {
      const auto& node = dag.nodes[cur[a]];
      Play p;
      p.index = p.slot = ++tr.pulls;
      p.arm = a;
      p.state = arm.ids[node.state];
      p.credited = p.slot <= B;
      p.reward = p.credited ? arm.reward[node.state] : 0.0;
      const int e = detail::draw_edge(arm, node.state, rng);
      if (e < 0) {
        time[a] = kInfTime;
      } else {
        const int v = arm.children[node.state][e].first;
        p.next = arm.ids[v];
        const int tv = node.succ[e];
        cur[a] = tv == kInfTime ? -1 : dag.find(v, tv);
        time[a] = tv;
      }
      tr.credited_reward += p.reward;
      tr.plays.push_back(std::move(p));
      ++tau;
    }
  }
  return tr;
}

}  // namespace stocpack
