#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stocpack/lp.hpp"
#include "stocpack/model.hpp"

namespace stocpack {

/// Variable map for the bandit LPs. Time runs over [1, B]; index 0 of each
/// per-state vector is unused so that z[a][u][t] reads like the LP.
struct MabLPIndex {
  int budget = 0;
  std::vector<CompiledArm> arms;
  std::vector<std::vector<std::vector<int>>> z, w, x;  // [arm][state][t]; x empty unless LP4

  bool has_exploit() const { return !x.empty(); }
};

namespace detail {

enum class MabFlavor { tree, dag, exploit };

inline std::pair<LinearProgram, MabLPIndex> build_mab_lp(const MABInstance& inst, MabFlavor flavor) {
  require_valid(inst);
  const int B = inst.budget;
  MabLPIndex idx;
  idx.budget = B;
  idx.arms = compile_arms(inst);
  LinearProgram lp;
  const int na = static_cast<int>(inst.arms.size());
  idx.z.resize(na);
  idx.w.resize(na);
  if (flavor == MabFlavor::exploit) idx.x.resize(na);

  for (int a = 0; a < na; ++a) {
    const auto& arm = idx.arms[a];
    const int ns = arm.size();
    idx.z[a].assign(ns, std::vector<int>(B + 1, -1));
    idx.w[a].assign(ns, std::vector<int>(B + 1, -1));
    if (flavor == MabFlavor::exploit) idx.x[a].assign(ns, std::vector<int>(B + 1, -1));
    for (int u = 0; u < ns; ++u) {
      const int depth = arm.depth[u];
      for (int t = 1; t <= B; ++t) {
        // A state at depth d is entered at time d+1 at the earliest.
        const bool live = depth >= 0 && depth < t;
        const std::string suf = "_" + std::to_string(a) + "_" + std::to_string(u) + "_" + std::to_string(t);
        const double hi = live ? 1.0 : 0.0;
        idx.z[a][u][t] = lp.add_variable("z" + suf, 0.0, hi);
        double wlo = 0.0, whi = hi;
        if (u == arm.root) wlo = whi = (t == 1 ? 1.0 : 0.0);
        idx.w[a][u][t] = lp.add_variable("w" + suf, wlo, whi);
        if (flavor == MabFlavor::exploit) {
          idx.x[a][u][t] = lp.add_variable("x" + suf, 0.0, hi);
          lp.set_objective(idx.x[a][u][t], arm.reward[u]);
        } else {
          lp.set_objective(idx.z[a][u][t], arm.reward[u]);
        }
      }
    }
  }

  for (int a = 0; a < na; ++a) {
    const auto& arm = idx.arms[a];
    for (int u = 0; u < arm.size(); ++u) {
      if (u == arm.root) continue;
      for (int t = 2; t <= B; ++t) {
        SparseRow row{{idx.w[a][u][t], 1.0}};
        if (flavor == MabFlavor::dag) {
          for (auto [v, p] : arm.in_edges[u]) row.emplace_back(idx.z[a][v][t - 1], -p);
        } else {
          auto [v, p] = arm.in_edges[u].front();
          row.emplace_back(idx.z[a][v][t - 1], -p);
        }
        lp.add_constraint(std::move(row), Relation::eq, 0.0,
                          "arrive_" + std::to_string(a) + "_" + std::to_string(u) + "_" + std::to_string(t));
      }
    }
    for (int u = 0; u < arm.size(); ++u)
      for (int t = 1; t <= B; ++t) {
        SparseRow row;
        for (int s = 1; s <= t; ++s) {
          row.emplace_back(idx.w[a][u][s], 1.0);
          row.emplace_back(idx.z[a][u][s], -1.0);
          if (flavor == MabFlavor::exploit) row.emplace_back(idx.x[a][u][s], -1.0);
        }
        lp.add_constraint(std::move(row), Relation::ge, 0.0,
                          "reach_" + std::to_string(a) + "_" + std::to_string(u) + "_" + std::to_string(t));
      }
  }
  for (int t = 1; t <= B; ++t) {
    SparseRow row;
    for (int a = 0; a < na; ++a)
      for (int u = 0; u < idx.arms[a].size(); ++u) row.emplace_back(idx.z[a][u][t], 1.0);
    lp.add_constraint(std::move(row), Relation::le, 1.0, "slot_" + std::to_string(t));
  }
  if (flavor == MabFlavor::exploit) {
    SparseRow row;
    for (int a = 0; a < na; ++a)
      for (int u = 0; u < idx.arms[a].size(); ++u)
        for (int t = 1; t <= B; ++t) row.emplace_back(idx.x[a][u][t], 1.0);
    lp.add_constraint(std::move(row), Relation::le, *inst.exploit_budget, "exploits");
  }
  return {std::move(lp), std::move(idx)};
}

}  // namespace detail

inline std::pair<LinearProgram, MabLPIndex> build_lp_mab(const MABInstance& inst) {
  for (const auto& a : inst.arms)
    if (a.shape != ArmShape::tree) throw InvalidInstance("LP_mab needs tree arms");
  return detail::build_mab_lp(inst, detail::MabFlavor::tree);
}

inline std::pair<LinearProgram, MabLPIndex> build_lp_mabdag(const MABInstance& inst) {
  for (const auto& a : inst.arms) {
    if (a.shape == ArmShape::graph) throw InvalidInstance("LP_mabdag needs layered arms; run layer_dag first");
  }
  return detail::build_mab_lp(inst, detail::MabFlavor::dag);
}

inline std::pair<LinearProgram, MabLPIndex> build_lp4(const MABInstance& inst) {
  if (!inst.exploit_budget) throw InvalidInstance("LP4 needs an exploit budget K");
  for (const auto& a : inst.arms)
    if (a.shape != ArmShape::tree) throw InvalidInstance("LP4 needs tree arms");
  return detail::build_mab_lp(inst, detail::MabFlavor::exploit);
}

/// Instance whose arms are replaced by their layered unrolling.
inline MABInstance layered_instance(const MABInstance& inst) {
  MABInstance out = inst;
  for (auto& a : out.arms) a = layer_dag(a, inst.budget);
  return out;
}

}  // namespace stocpack
