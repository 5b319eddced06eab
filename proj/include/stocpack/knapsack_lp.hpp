#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "stocpack/lp.hpp"
#include "stocpack/model.hpp"

namespace stocpack {

/// E[min(S, t)].
inline double expected_truncated_size(const ItemDist& item, int t) {
  double e = 0.0;
  for (auto [s, p] : item.probs) e += p * std::min(s, t);
  return e;
}

/// ER_{i,t}: expected reward of an item started after t units are used.
inline double expected_start_reward(const ItemDist& item, int t, int B) {
  double e = 0.0;
  for (auto [s, p] : item.probs)
    if (s <= B - t) e += p * item.reward(s);
  return e;
}

/// pi_t / sum_{t' >= t} pi_{t'}, or 0 when no mass remains.
inline double hazard(const ItemDist& item, int t) {
  double tail = 0.0;
  for (auto it = item.probs.lower_bound(t); it != item.probs.end(); ++it) tail += it->second;
  return tail > 0.0 ? item.prob(t) / tail : 0.0;
}

inline int floor_log2(int x) {
  int j = 0;
  while ((2 << j) <= x) ++j;
  return j;
}

// ------------------------------------------------------------ LP_NoCancel

struct NoCancelLPIndex {
  int budget = 0;
  std::vector<std::vector<int>> x;  // x[i][t], t in [0, B-1]
  int var(int i, int t) const { return x.at(i).at(t); }
};

inline std::pair<LinearProgram, NoCancelLPIndex> build_lp_nocancel(const StocKInstance& inst) {
  require_valid(inst);
  const int B = inst.budget, n = static_cast<int>(inst.items.size());
  LinearProgram lp;
  NoCancelLPIndex idx{B, std::vector<std::vector<int>>(n, std::vector<int>(B))};
  for (int i = 0; i < n; ++i) {
    double prev = kInf;
    for (int t = 0; t < B; ++t) {
      const int v = lp.add_variable("x_" + std::to_string(i) + "_" + std::to_string(t), 0.0, 1.0);
      idx.x[i][t] = v;
      const double er = expected_start_reward(inst.items[i], t, B);
      if (er > prev + 1e-12) throw std::logic_error("ER must be non-increasing in t");
      prev = er;
      lp.set_objective(v, er);
    }
  }
  for (int i = 0; i < n; ++i) {
    SparseRow row;
    for (int t = 0; t < B; ++t) row.emplace_back(idx.x[i][t], 1.0);
    lp.add_constraint(std::move(row), Relation::le, 1.0, "once_" + std::to_string(i));
  }
  for (int t = 1; t <= B; ++t) {
    SparseRow row;
    for (int i = 0; i < n; ++i) {
      const double e = expected_truncated_size(inst.items[i], t);
      for (int s = 0; s < t; ++s) row.emplace_back(idx.x[i][s], e);
    }
    lp.add_constraint(std::move(row), Relation::le, 2.0 * t, "load_" + std::to_string(t));
  }
  return {std::move(lp), std::move(idx)};
}

// -------------------------------------------------------------- PolyLP_L

/// Start-time class j covers [2^j - 1, 2^{j+1} - 1) clipped to [0, B-1].
struct PolyNoCancelIndex {
  int budget = 0;
  int classes = 0;
  std::vector<std::vector<int>> x;  // x[i][j]

  std::pair<int, int> class_range(int j) const {  // half-open
    const int lo = (1 << j) - 1;
    const int hi = std::min((2 << j) - 1, budget);
    return {lo, hi};
  }
  int class_size(int j) const {
    auto [lo, hi] = class_range(j);
    return hi - lo;
  }
};

inline std::pair<LinearProgram, PolyNoCancelIndex> build_poly_lp_nocancel(const StocKInstance& inst) {
  require_valid(inst);
  const int B = inst.budget, n = static_cast<int>(inst.items.size());
  PolyNoCancelIndex idx;
  idx.budget = B;
  idx.classes = floor_log2(B) + 1;
  idx.x.assign(n, std::vector<int>(idx.classes));
  LinearProgram lp;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < idx.classes; ++j) {
      const int v = lp.add_variable("x_" + std::to_string(i) + "_p" + std::to_string(j), 0.0, 1.0);
      idx.x[i][j] = v;
      // first start of the next class, a lower bound on ER over class j
      const int t = (2 << j) - 1;
      lp.set_objective(v, t < B ? expected_start_reward(inst.items[i], t, B) : 0.0);
    }
  for (int i = 0; i < n; ++i) {
    SparseRow row;
    for (int j = 0; j < idx.classes; ++j) row.emplace_back(idx.x[i][j], 1.0);
    lp.add_constraint(std::move(row), Relation::le, 1.0, "once_" + std::to_string(i));
  }
  for (int j = 0; j < idx.classes; ++j) {
    SparseRow row;
    for (int i = 0; i < n; ++i) {
      const double e = expected_truncated_size(inst.items[i], 2 << j);
      for (int k = 0; k <= j; ++k) row.emplace_back(idx.x[i][k], e);
    }
    lp.add_constraint(std::move(row), Relation::le, 2.0 * (1 << j), "load_p" + std::to_string(j));
  }
  return {std::move(lp), std::move(idx)};
}

/// Spreads each class mass uniformly over its start times, giving a point
/// of LP_NoCancel (values indexed like NoCancelLPIndex).
inline std::vector<double> expand_poly_solution(const LPSolution& sol, const PolyNoCancelIndex& pidx,
                                                const NoCancelLPIndex& idx) {
  std::vector<double> out;
  for (const auto& row : idx.x) out.resize(std::max<std::size_t>(out.size(), row.empty() ? 0 : row.back() + 1));
  for (std::size_t i = 0; i < pidx.x.size(); ++i)
    for (int j = 0; j < pidx.classes; ++j) {
      auto [lo, hi] = pidx.class_range(j);
      const double share = sol.x[pidx.x[i][j]] / (hi - lo);
      for (int t = lo; t < hi; ++t) out.at(idx.x[i][t]) = share;
    }
  return out;
}

// -------------------------------------------------------------------- LP_S

struct SmallLPIndex {
  int budget = 0;
  std::vector<std::vector<int>> v, s;  // [i][t], t in [0, B]
};

inline bool is_early(const StocKInstance& inst) {
  for (const auto& it : inst.items)
    for (auto [s, r] : it.rewards)
      if (s > inst.budget / 2 && r != 0.0) return false;
  return true;
}

inline bool is_late(const StocKInstance& inst) {
  for (const auto& it : inst.items)
    for (auto [s, r] : it.rewards)
      if (s <= inst.budget / 2 && r != 0.0) return false;
  return true;
}

namespace detail {

// Shared shape of LP_S and PolyLP_S: point k has length len[k] and a
// completion hazard haz[i][k]; reward weight wr[i][k] multiplies v.
inline void build_stopping_lp(LinearProgram& lp, SmallLPIndex& idx, const std::vector<int>& len,
                              const std::vector<std::vector<double>>& haz,
                              const std::vector<std::vector<double>>& wr, int B, const std::string& tag) {
  const int n = static_cast<int>(haz.size()), K = static_cast<int>(len.size());
  idx.budget = B;
  idx.v.assign(n, std::vector<int>(K));
  idx.s.assign(n, std::vector<int>(K));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k) {
      const std::string suf = "_" + std::to_string(i) + "_" + tag + std::to_string(k);
      idx.v[i][k] = lp.add_variable("v" + suf, k == 0 ? 1.0 : 0.0, 1.0);
      idx.s[i][k] = lp.add_variable("s" + suf, 0.0, 1.0);
      lp.set_objective(idx.v[i][k], wr[i][k]);
    }
  SparseRow budget_row;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k) {
      const std::string suf = std::to_string(i) + "_" + std::to_string(k);
      SparseRow flow{{idx.v[i][k], 1.0}, {idx.s[i][k], -1.0}};
      if (k + 1 < K) flow.emplace_back(idx.v[i][k + 1], -1.0);
      lp.add_constraint(std::move(flow), Relation::eq, 0.0, "flow_" + suf);
      lp.add_constraint({{idx.s[i][k], 1.0}, {idx.v[i][k], -haz[i][k]}}, Relation::ge, 0.0, "hazard_" + suf);
      if (len[k] > 0) budget_row.emplace_back(idx.s[i][k], len[k]);
    }
  lp.add_constraint(std::move(budget_row), Relation::le, B, "budget");
}

}  // namespace detail

inline std::pair<LinearProgram, SmallLPIndex> build_lp_small(const StocKInstance& inst) {
  require_valid(inst);
  if (!is_early(inst)) throw InvalidInstance("LP_S needs an early instance (no reward above B/2)");
  const int B = inst.budget, n = static_cast<int>(inst.items.size());
  std::vector<int> len(B + 1);
  for (int t = 0; t <= B; ++t) len[t] = t;
  std::vector<std::vector<double>> haz(n, std::vector<double>(B + 1)), wr = haz;
  for (int i = 0; i < n; ++i)
    for (int t = 0; t <= B; ++t) {
      haz[i][t] = hazard(inst.items[i], t);
      if (t >= 1 && t <= B / 2) wr[i][t] = inst.items[i].reward(t) * haz[i][t];
    }
  LinearProgram lp;
  SmallLPIndex idx;
  detail::build_stopping_lp(lp, idx, len, haz, wr, B, "");
  return {std::move(lp), std::move(idx)};
}

// --------------------------------------------------------------- PolyLP_S

/// Quantized item: class j collects sizes [2^j, 2^{j+1}).
struct QuantizedItem {
  std::vector<double> prob;    // pi-bar per class
  std::vector<double> reward;  // probability-weighted mean reward per class
};

inline std::vector<QuantizedItem> quantize_instance(const StocKInstance& inst) {
  const int J = floor_log2(inst.budget);
  std::vector<QuantizedItem> out;
  for (const auto& it : inst.items) {
    QuantizedItem q{std::vector<double>(J + 1, 0.0), std::vector<double>(J + 1, 0.0)};
    for (auto [s, p] : it.probs) {
      if (s < 1) continue;
      const int j = std::min(floor_log2(s), J);
      q.prob[j] += p;
      q.reward[j] += p * it.reward(s);
    }
    for (int j = 0; j <= J; ++j) q.reward[j] = q.prob[j] > 0.0 ? q.reward[j] / q.prob[j] : 0.0;
    out.push_back(std::move(q));
  }
  return out;
}

/// Points of the quantized LP: point 0 is "not started", point k >= 1 is
/// quantized size 2^{k-1}, reached in real time after 2^k - 1 units.
struct PolySmallLPIndex : SmallLPIndex {
  std::vector<int> point_len;   // 0, 1, 2, 4, ...
  std::vector<int> real_units;  // 0, 1, 3, 7, ...
  std::vector<std::vector<double>> hazard;
};

inline std::pair<LinearProgram, PolySmallLPIndex> build_poly_lp_small(const StocKInstance& inst) {
  require_valid(inst);
  if (!is_early(inst)) throw InvalidInstance("PolyLP_S needs an early instance (no reward above B/2)");
  const int B = inst.budget, n = static_cast<int>(inst.items.size());
  const int J = floor_log2(B);
  const auto q = quantize_instance(inst);
  PolySmallLPIndex idx;
  idx.point_len.push_back(0);
  idx.real_units.push_back(0);
  for (int k = 1; k <= J + 1; ++k) {
    idx.point_len.push_back(1 << (k - 1));
    idx.real_units.push_back((1 << k) - 1);
  }
  const int K = J + 2;
  idx.hazard.assign(n, std::vector<double>(K, 0.0));
  std::vector<std::vector<double>> wr(n, std::vector<double>(K, 0.0));
  for (int i = 0; i < n; ++i) {
    double tail = 0.0;
    for (int j = J; j >= 0; --j) {
      tail += q[i].prob[j];
      idx.hazard[i][j + 1] = tail > 0.0 ? q[i].prob[j] / tail : 0.0;
    }
    for (int k = 1; k < K; ++k)
      if (idx.point_len[k] <= B / 2) wr[i][k] = q[i].reward[k - 1] * idx.hazard[i][k];
  }
  LinearProgram lp;
  detail::build_stopping_lp(lp, idx, idx.point_len, idx.hazard, wr, B, "p");
  return {std::move(lp), std::move(idx)};
}

}  // namespace stocpack
