#pragma once

// Exact optimal adaptive policies by memoized dynamic programming.

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stocpack/model.hpp"

namespace stocpack {

struct OracleResult {
  double value = 0.0;
  std::int64_t states = 0;  // memo entries evaluated
  std::string size_report;  // what the guard measured
};

namespace detail {

inline void guard(bool ok, const std::string& report) {
  if (!ok) throw GuardExceeded("oracle size guard exceeded: " + report);
}

inline std::string stock_report(const StocKInstance& inst) {
  return "n=" + std::to_string(inst.items.size()) + " B=" + std::to_string(inst.budget);
}

}  // namespace detail

/// Optimal non-cancelling policy. Items run to completion; an item that
/// overflows the budget ends the process with no reward from it.
inline OracleResult opt_nocancel(const StocKInstance& inst) {
  require_valid(inst);
  const int n = static_cast<int>(inst.items.size()), B = inst.budget;
  const std::string rep = detail::stock_report(inst);
  detail::guard(n <= 16 && B <= 64, rep);
  std::vector<double> memo((std::size_t(1) << n) * (B + 1), -1.0);
  OracleResult res;
  res.size_report = rep;
  std::function<double(unsigned, int)> V = [&](unsigned avail, int b) -> double {
    double& m = memo[std::size_t(avail) * (B + 1) + b];
    if (m >= 0.0) return m;
    ++res.states;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!(avail >> i & 1u)) continue;
      double v = 0.0;
      for (auto [s, p] : inst.items[i].probs)
        if (s <= b && p > 0.0) v += p * (inst.items[i].reward(s) + V(avail & ~(1u << i), b - s));
      best = std::max(best, v);
    }
    return m = best;
  };
  res.value = V((1u << n) - 1u, B);
  return res;
}

/// Optimal policy that may abandon the running item after any whole unit.
inline OracleResult opt_cancel(const StocKInstance& inst) {
  require_valid(inst);
  const int n = static_cast<int>(inst.items.size()), B = inst.budget;
  const std::string rep = detail::stock_report(inst);
  detail::guard(n <= 6 && B <= 16, rep);
  // tail[i][e] = P(S_i >= e)
  std::vector<std::vector<double>> tail(n, std::vector<double>(B + 2, 0.0));
  for (int i = 0; i < n; ++i)
    for (int e = B; e >= 0; --e) tail[i][e] = tail[i][e + 1] + inst.items[i].prob(e);
  const std::size_t subsets = std::size_t(1) << n;
  std::vector<double> F(subsets * (B + 1), -1.0);
  std::vector<double> G(std::size_t(n) * (B + 1) * subsets * (B + 1), -1.0);
  OracleResult res;
  res.size_report = rep;
  std::function<double(unsigned, int)> f;
  // item i has run e units without completing; b units remain
  std::function<double(int, int, unsigned, int)> g = [&](int i, int e, unsigned rest, int b) -> double {
    double& m = G[((std::size_t(i) * (B + 1) + e) * subsets + rest) * (B + 1) + b];
    if (m >= 0.0) return m;
    ++res.states;
    double best = f(rest, b);  // cancel now
    if (b >= 1 && e + 1 <= B && tail[i][e + 1] > 0.0) {
      const double h = inst.items[i].prob(e + 1) / tail[i][e + 1];
      double go = h * (inst.items[i].reward(e + 1) + f(rest, b - 1));
      if (h < 1.0) go += (1.0 - h) * g(i, e + 1, rest, b - 1);
      best = std::max(best, go);
    }
    return m = best;
  };
  f = [&](unsigned avail, int b) -> double {
    double& m = F[std::size_t(avail) * (B + 1) + b];
    if (m >= 0.0) return m;
    ++res.states;
    double best = 0.0;
    for (int i = 0; i < n; ++i)
      if (avail >> i & 1u) best = std::max(best, g(i, 0, avail & ~(1u << i), b));
    return m = best;
  };
  res.value = f(static_cast<unsigned>(subsets - 1), B);
  return res;
}

enum class MabRewardModel { on_pull, exploit };

namespace detail {

struct JointSpace {
  std::vector<CompiledArm> arms;
  std::vector<std::uint64_t> radix;  // per arm: positions 0..size (size = done)
  std::uint64_t positions = 1;

  explicit JointSpace(const MABInstance& inst) : arms(compile_arms(inst)) {
    for (const auto& a : arms) {
      radix.push_back(positions);
      positions *= static_cast<std::uint64_t>(a.size() + 1);
      if (positions > (std::uint64_t(1) << 40)) break;
    }
  }
  int pos(std::uint64_t code, int a) const { return int(code / radix[a] % (arms[a].size() + 1)); }
  std::uint64_t move(std::uint64_t code, int a, int to) const {
    return code + (std::uint64_t(to) - std::uint64_t(pos(code, a))) * radix[a];
  }
  bool done(std::uint64_t code, int a) const { return pos(code, a) == arms[a].size(); }
  std::uint64_t start() const {
    std::uint64_t c = 0;
    for (std::size_t a = 0; a < arms.size(); ++a) c += std::uint64_t(arms[a].root) * radix[a];
    return c;
  }
};

inline std::string mab_report(const MABInstance& inst, std::uint64_t product) {
  return "arms=" + std::to_string(inst.arms.size()) + " B=" + std::to_string(inst.budget) +
         " product states=" + std::to_string(product);
}

}  // namespace detail

/// Optimal adaptive policy over the joint state of all arms. In the exploit
/// model pulls earn nothing; exploiting a state earns its reward, drops the
/// arm, uses one unit of K and is allowed while a pull slot remains.
inline OracleResult opt_mab(const MABInstance& inst, MabRewardModel model = MabRewardModel::on_pull) {
  require_valid(inst);
  const detail::JointSpace js(inst);
  const int B = inst.budget, na = static_cast<int>(js.arms.size());
  const int K = model == MabRewardModel::exploit ? inst.exploit_budget.value_or(0) : 0;
  const double product = double(js.positions) * (B + 1) * (K + 1);
  const std::string rep = detail::mab_report(inst, static_cast<std::uint64_t>(product));
  detail::guard(product <= 1e6, rep);
  std::unordered_map<std::uint64_t, double> memo;
  OracleResult res;
  res.size_report = rep;
  std::function<double(std::uint64_t, int, int)> V = [&](std::uint64_t code, int b, int k) -> double {
    if (b == 0) return 0.0;
    const std::uint64_t key = (code * (B + 1) + b) * (K + 1) + k;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    ++res.states;
    double best = 0.0;
    for (int a = 0; a < na; ++a) {
      if (js.done(code, a)) continue;
      const auto& arm = js.arms[a];
      const int u = js.pos(code, a);
      double pull = model == MabRewardModel::on_pull ? arm.reward[u] : 0.0;
      if (arm.is_leaf(u)) {
        pull += V(js.move(code, a, arm.size()), b - 1, k);
      } else {
        for (auto [v, p] : arm.children[u])
          if (p > 0.0) pull += p * V(js.move(code, a, v), b - 1, k);
      }
      best = std::max(best, pull);
      if (model == MabRewardModel::exploit && k >= 1)
        best = std::max(best, arm.reward[u] + V(js.move(code, a, arm.size()), b, k - 1));
    }
    memo.emplace(key, best);
    return best;
  };
  res.value = V(js.start(), B, K);
  return res;
}

/// Best policy that never resumes an arm once it has switched away from it
/// (reward-on-pull model).
inline OracleResult opt_mab_nonpreempting(const MABInstance& inst) {
  require_valid(inst);
  const detail::JointSpace js(inst);
  const int B = inst.budget, na = static_cast<int>(js.arms.size());
  const double product = double(js.positions) * (B + 1);
  const std::string rep = detail::mab_report(inst, static_cast<std::uint64_t>(product));
  detail::guard(product <= 1e6 && na <= 16, rep);
  std::unordered_map<std::uint64_t, double> memo;
  OracleResult res;
  res.size_report = rep;
  // cur = arm being played (na = none); closed = arms left for good
  std::function<double(std::uint64_t, unsigned, int, int)> V = [&](std::uint64_t code, unsigned closed, int cur,
                                                                    int b) -> double {
    if (b == 0) return 0.0;
    const std::uint64_t key = ((code * (B + 1) + b) * (na + 1) + cur) * (std::uint64_t(1) << na) + closed;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    ++res.states;
    auto pull = [&](int a, unsigned cl) {
      const auto& arm = js.arms[a];
      const int u = js.pos(code, a);
      double v = arm.reward[u];
      if (arm.is_leaf(u)) return v + V(js.move(code, a, arm.size()), cl, a, b - 1);
      for (auto [c, p] : arm.children[u])
        if (p > 0.0) v += p * V(js.move(code, a, c), cl, a, b - 1);
      return v;
    };
    double best = 0.0;
    if (cur < na && !js.done(code, cur)) best = std::max(best, pull(cur, closed));
    for (int a = 0; a < na; ++a) {
      if (a == cur || (closed >> a & 1u) || js.done(code, a)) continue;
      const unsigned cl = cur < na ? closed | (1u << cur) : closed;
      best = std::max(best, pull(a, cl));
    }
    memo.emplace(key, best);
    return best;
  };
  res.value = V(js.start(), 0u, na, B);
  return res;
}

}  // namespace stocpack
