#pragma once

// Instance families: the three adversarial constructions plus seeded random
// knapsack and bandit suites.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "stocpack/model.hpp"

namespace stocpack {

/// Cancellation helps: every item has size 1 or n/2 with equal odds.
inline StocKInstance gen_cancel_benefit(int n) {
  if (n < 4 || n % 2 != 0) throw InvalidInstance("cancel-benefit needs an even n >= 4");
  StocKInstance inst;
  inst.budget = n;
  for (int i = 0; i < n; ++i) {
    ItemDist it;
    it.probs = {{1, 0.5}, {n / 2, 0.5}};
    it.rewards = {{1, 1.0}, {n / 2, 1.0}};
    inst.items.push_back(std::move(it));
  }
  return inst;
}

/// Reward only when the item is large; an expected-size LP overestimates.
inline StocKInstance gen_correlated_gap(int n) {
  if (n < 2) throw InvalidInstance("correlated-gap needs n >= 2");
  StocKInstance inst;
  inst.budget = n;
  for (int i = 0; i < n; ++i) {
    ItemDist it;
    it.probs = {{1, 1.0 - 1.0 / n}, {n, 1.0 / n}};
    it.rewards = {{1, 0.0}, {n, 1.0}};
    inst.items.push_back(std::move(it));
  }
  return inst;
}

namespace detail {
inline long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}
}  // namespace detail

/// Smallest budget for which every right-hand chain is nonempty, plus one
/// unit of slack: n * (sum_{k<=m} L^k + 1).
inline int preemption_gap_default_budget(int n, int L, int m) {
  long s = 0;
  for (int k = 0; k <= m; ++k) s += detail::ipow(L, k);
  return static_cast<int>(n * (s + 1));
}

/// n identical arms. From rho(j) the arm enters a right chain with
/// probability 1/(n * n^{m-j}) whose last state pays n^{m-j}; otherwise it
/// walks L^{j+1} steps to rho(j+1). rho(m) pays 1 with probability 1/n.
inline MABInstance gen_preemption_gap(int n, int L, int m, int B = 0) {
  if (n < 2 || L <= n || m < 0) throw InvalidInstance("preemption-gap needs n >= 2, L > n, m >= 0");
  if (B <= 0) B = preemption_gap_default_budget(n, L, m);
  long prefix = 0;
  for (int j = 0; j < m; ++j) {
    prefix += detail::ipow(L, j);
    if (B - n * prefix < 1)
      throw InvalidInstance("preemption-gap: B=" + std::to_string(B) + " leaves an empty right chain at level " +
                            std::to_string(j));
  }
  MABInstance inst;
  inst.budget = B;
  for (int a = 0; a < n; ++a) {
    Arm arm;
    arm.shape = ArmShape::tree;
    const std::string pre = "a" + std::to_string(a) + ".";
    auto add = [&](const std::string& id) {
      arm.states.push_back(pre + id);
      return pre + id;
    };
    auto rho = [&](int j) { return pre + "rho" + std::to_string(j); };
    arm.root = add("rho0");
    long sum = 0;
    for (int j = 0; j < m; ++j) {
      sum += detail::ipow(L, j);
      const double right = 1.0 / (n * static_cast<double>(detail::ipow(n, m - j)));
      const long chain = B - n * sum;
      std::string prev = rho(j);
      for (long k = 1; k <= chain; ++k) {
        const std::string id = add("r" + std::to_string(j) + "_" + std::to_string(k));
        arm.edges.push_back({prev, id, k == 1 ? right : 1.0});
        prev = id;
      }
      arm.rewards[prev] = static_cast<double>(detail::ipow(n, m - j));
      const long left = detail::ipow(L, j + 1) - 1;
      prev = rho(j);
      for (long k = 1; k <= left; ++k) {
        const std::string id = add("l" + std::to_string(j) + "_" + std::to_string(k));
        arm.edges.push_back({prev, id, k == 1 ? 1.0 - right : 1.0});
        prev = id;
      }
      const std::string next = add("rho" + std::to_string(j + 1));
      arm.edges.push_back({prev, next, left == 0 ? 1.0 - right : 1.0});
    }
    const std::string win = add("win"), lose = add("lose");
    arm.edges.push_back({rho(m), win, 1.0 / n});
    arm.edges.push_back({rho(m), lose, 1.0 - 1.0 / n});
    arm.rewards[win] = 1.0;
    inst.arms.push_back(std::move(arm));
  }
  return inst;
}

namespace detail {
// Normalized random weights; the last entry absorbs rounding so the sum is 1.
inline std::vector<double> random_simplex(int k, Rng& rng) {
  std::vector<double> w(k);
  for (auto& x : w) x = 0.05 + rng.uniform();
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  double used = 0.0;
  for (int i = 0; i + 1 < k; ++i) {
    w[i] /= s;
    used += w[i];
  }
  w[k - 1] = 1.0 - used;
  return w;
}
}  // namespace detail

/// Each item gets `support` distinct sizes in [1, B], random probabilities
/// and rewards in [0, 1].
inline StocKInstance gen_random_stock(int n, int B, int support, std::uint64_t seed) {
  if (n < 0 || B < 1 || support < 1) throw InvalidInstance("random-stock needs n >= 0, B >= 1, support >= 1");
  Rng rng(seed);
  StocKInstance inst;
  inst.budget = B;
  const int k = std::min(support, B);
  for (int i = 0; i < n; ++i) {
    std::vector<int> sizes(B);
    std::iota(sizes.begin(), sizes.end(), 1);
    for (int s = 0; s < k; ++s) std::swap(sizes[s], sizes[rng.uniform_int(s, B - 1)]);
    sizes.resize(k);
    std::sort(sizes.begin(), sizes.end());
    const auto p = detail::random_simplex(k, rng);
    ItemDist it;
    for (int s = 0; s < k; ++s) {
      it.probs[sizes[s]] = p[s];
      it.rewards[sizes[s]] = rng.uniform();
    }
    inst.items.push_back(std::move(it));
  }
  return inst;
}

/// Random arms with `states` states each. Tree arms are random
/// arborescences; with layered = true each non-root state is attached to one
/// state of the previous layer, and often to a second distinct one.
inline MABInstance gen_random_mab(int arms, int states, int B, std::uint64_t seed,
                                  std::optional<int> K = std::nullopt, bool layered = false) {
  if (arms < 1 || states < 1 || B < 1) throw InvalidInstance("random-mab needs positive parameters");
  Rng rng(seed);
  MABInstance inst;
  inst.budget = B;
  inst.exploit_budget = K;
  for (int a = 0; a < arms; ++a) {
    Arm arm;
    arm.shape = layered ? ArmShape::layered_dag : ArmShape::tree;
    auto id = [&](int s) { return "a" + std::to_string(a) + "s" + std::to_string(s); };
    for (int s = 0; s < states; ++s) arm.states.push_back(id(s));
    arm.root = id(0);
    std::vector<std::vector<int>> kids(states);
    if (!layered) {
      for (int s = 1; s < states; ++s) kids[rng.uniform_int(0, s - 1)].push_back(s);
    } else {
      std::vector<int> layer(states, 0);
      for (int s = 1; s < states; ++s) layer[s] = layer[s - 1] + (rng.bernoulli(0.4) || s == 1 ? 1 : 0);
      for (int s = 1; s < states; ++s) {
        std::vector<int> prev;
        for (int u = 0; u < s; ++u)
          if (layer[u] == layer[s] - 1) prev.push_back(u);
        const int pick = rng.uniform_int(0, static_cast<int>(prev.size()) - 1);
        kids[prev[pick]].push_back(s);
        if (prev.size() > 1 && rng.bernoulli(0.75)) {
          // a distinct second parent makes s a merge state
          const int off = rng.uniform_int(1, static_cast<int>(prev.size()) - 1);
          kids[prev[(pick + off) % prev.size()]].push_back(s);
        }
      }
    }
    for (int u = 0; u < states; ++u) {
      if (kids[u].empty()) continue;
      std::sort(kids[u].begin(), kids[u].end());
      const auto p = detail::random_simplex(static_cast<int>(kids[u].size()), rng);
      for (std::size_t k = 0; k < kids[u].size(); ++k) arm.edges.push_back({id(u), id(kids[u][k]), p[k]});
    }
    for (int s = 0; s < states; ++s) arm.rewards[id(s)] = rng.uniform();
    inst.arms.push_back(std::move(arm));
  }
  return inst;
}

}  // namespace stocpack
