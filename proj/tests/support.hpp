#pragma once

// Small instance builders shared by the unit tests.

#include <initializer_list>
#include <string>
#include <tuple>
#include <vector>

#include "stocpack/stocpack.hpp"

namespace testutil {

using namespace stocpack;

// {size, prob, reward} triples.
inline ItemDist item(std::initializer_list<std::tuple<int, double, double>> outcomes) {
  ItemDist it;
  for (auto [s, p, r] : outcomes) {
    it.probs[s] = p;
    it.rewards[s] = r;
  }
  return it;
}

inline StocKInstance stock(int B, std::vector<ItemDist> items) {
  StocKInstance inst;
  inst.budget = B;
  inst.items = std::move(items);
  return inst;
}

// Tree arm from (parent, child, p) triples plus rewards.
inline Arm tree_arm(const std::string& root, std::vector<std::tuple<std::string, std::string, double>> edges,
                    std::map<std::string, double> rewards, ArmShape shape = ArmShape::tree) {
  Arm a;
  a.root = root;
  a.shape = shape;
  a.states.push_back(root);
  for (auto& [u, v, p] : edges) {
    for (const auto& s : {u, v})
      if (std::find(a.states.begin(), a.states.end(), s) == a.states.end()) a.states.push_back(s);
    a.edges.push_back({u, v, p});
  }
  a.rewards = std::move(rewards);
  return a;
}

inline MABInstance mab(int B, std::vector<Arm> arms, std::optional<int> K = std::nullopt) {
  MABInstance inst;
  inst.budget = B;
  inst.exploit_budget = K;
  inst.arms = std::move(arms);
  return inst;
}

inline LPSolution solved(const LinearProgram& lp) { return stocpack::detail::solve_checked(lp); }

}  // namespace testutil
