#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace testutil;

namespace {

// Largest violation among the flow rows only. Bounds are skipped because the
// residual of a pinned root arrival is no longer 1 after a peel.
double flow_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& c : lp.constraints()) {
    double act = 0.0;
    for (auto [v, a] : c.row) act += a * x[v];
    const double gap = c.rel == Relation::le ? act - c.rhs : c.rel == Relation::ge ? c.rhs - act : std::abs(act - c.rhs);
    worst = std::max(worst, gap);
  }
  for (double v : x) worst = std::max(worst, -v);
  return worst;
}

double max_gap(const std::vector<std::vector<double>>& m, const std::vector<std::vector<int>>& vars,
               const LPSolution& sol) {
  double g = 0.0;
  for (std::size_t u = 0; u < m.size(); ++u)
    for (std::size_t t = 1; t < m[u].size(); ++t) g = std::max(g, std::abs(m[u][t] - sol.x[vars[u][t]]));
  return g;
}

bool is_ancestor(const CompiledArm& arm, int a, int u) {
  for (; u >= 0; u = arm.parent(u))
    if (u == a) return true;
  return false;
}

}  // namespace

TEST(DecomposeTree, RootMassOnly) {
  const auto inst = mab(1, {tree_arm("r", {}, {{"r", 1.0}})});
  auto [lp, idx] = build_lp_mab(inst);
  LPSolution sol;
  sol.x.assign(lp.num_variables(), 0.0);
  sol.x[idx.z[0][0][1]] = 0.5;
  sol.x[idx.w[0][0][1]] = 1.0;
  const auto fs = decompose_tree(sol, idx, 0);
  ASSERT_EQ(fs.size(), 1u);
  EXPECT_EQ(fs[0].time[0], 1);
  EXPECT_DOUBLE_EQ(fs[0].prob[0], 0.5);
}

TEST(DecomposeTree, MarginalsCountsAndInvariants) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto inst = gen_random_mab(2, 3 + seed % 4, 3 + seed % 5, seed);
    auto [lp, idx] = build_lp_mab(inst);
    const auto sol = solved(lp);
    for (int a = 0; a < 2; ++a) {
      const auto& arm = idx.arms[a];
      double worst_residual = 0.0;
      const auto fs = decompose_tree(sol, idx, a, [&](const ArmResidual& r) {
        auto x = sol.x;
        write_residual(x, idx, a, r);
        worst_residual = std::max(worst_residual, flow_violation(lp, x));
      });
      EXPECT_LE(worst_residual, 1e-7) << "seed " << seed;
      EXPECT_LE(static_cast<long>(fs.size()), long(inst.budget) * arm.size());
      EXPECT_LE(max_gap(forest_marginals(fs, arm.size(), inst.budget), idx.z[a], sol), 1e-6) << "seed " << seed;
      double root = 0.0;
      for (const auto& f : fs) {
        EXPECT_TRUE(check_forest(arm, f).empty()) << "seed " << seed;
        root += f.prob[arm.root];
      }
      EXPECT_LE(root, 1.0 + 1e-7);
    }
  }
}

TEST(DecomposeTree, TreeflowOnRandomAntichains) {
  Rng pick(99);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = gen_random_mab(1, 7, 7, seed);
    auto [lp, idx] = build_lp_mab(inst);
    const auto fs = decompose_tree(solved(lp), idx, 0);
    const auto& arm = idx.arms[0];
    for (const auto& f : fs)
      for (int top = 0; top < arm.size(); ++top)
        for (int draw = 0; draw < 20; ++draw) {
          std::vector<int> chosen;
          for (int u = 0; u < arm.size(); ++u) {
            if (u == top || !is_ancestor(arm, top, u) || !pick.bernoulli(0.5)) continue;
            bool clash = false;
            for (int c : chosen) clash |= is_ancestor(arm, c, u) || is_ancestor(arm, u, c);
            if (!clash) chosen.push_back(u);
          }
          double below = 0.0;
          for (int c : chosen) below += f.prob[c];
          EXPECT_GE(f.prob[top] + 1e-12, below);
        }
  }
}

TEST(DecomposeExploit, RootExploitOnly) {
  const auto inst = mab(2, {tree_arm("r", {{"r", "c", 1.0}}, {{"r", 5.0}})}, 1);
  auto [lp, idx] = build_lp4(inst);
  LPSolution sol;
  sol.x.assign(lp.num_variables(), 0.0);
  sol.x[idx.x[0][0][1]] = 1.0;
  sol.x[idx.w[0][0][1]] = 1.0;
  const auto fs = decompose_exploit(sol, idx, 0);
  ASSERT_EQ(fs.size(), 1u);
  EXPECT_DOUBLE_EQ(fs[0].exploit[0], 1.0);
  EXPECT_DOUBLE_EQ(fs[0].pull[0], 0.0);
  EXPECT_FALSE(fs[0].present(1));
  EXPECT_TRUE(check_forest(idx.arms[0], fs[0]).empty());
}

TEST(DecomposeExploit, PullAndExploitMarginals) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto inst = gen_random_mab(2, 3 + seed % 3, 3 + seed % 4, seed, 1 + seed % 2);
    auto [lp, idx] = build_lp4(inst);
    const auto sol = solved(lp);
    for (int a = 0; a < 2; ++a) {
      const auto& arm = idx.arms[a];
      const auto fs = decompose_exploit(sol, idx, a);
      EXPECT_LE(static_cast<long>(fs.size()), 2L * inst.budget * arm.size());
      EXPECT_LE(max_gap(forest_marginals(fs, arm.size(), inst.budget), idx.z[a], sol), 1e-6) << "seed " << seed;
      EXPECT_LE(max_gap(forest_marginals(fs, arm.size(), inst.budget, true), idx.x[a], sol), 1e-6)
          << "seed " << seed;
      for (const auto& f : fs) EXPECT_TRUE(check_forest(arm, f).empty()) << "seed " << seed;
    }
  }
}

TEST(PeelStrat, RootOnlyArm) {
  const auto inst = mab(2, {tree_arm("r", {}, {{"r", 1.0}}, ArmShape::layered_dag)});
  auto [lp, idx] = build_lp_mabdag(inst);
  const auto sol = solved(lp);
  const auto dag = peel_strat(extract_residual(sol, idx, 0), idx.arms[0], 2);
  ASSERT_EQ(dag.nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(dag.root().prob, 1.0);
}

TEST(PeelStrat, DiamondAccumulatesPeelProb) {
  const auto arm = tree_arm("r",
                            {{"r", "a", 0.5}, {"r", "b", 0.5}, {"a", "c", 0.25}, {"a", "d", 0.75},
                             {"b", "c", 0.75}, {"b", "d", 0.25}},
                            {{"c", 1.0}}, ArmShape::layered_dag);
  auto [lp, idx] = build_lp_mabdag(mab(3, {arm}));
  const auto& c = idx.arms[0];
  ArmResidual r;
  r.z.assign(c.size(), std::vector<double>(4, 0.0));
  r.w = r.z;
  r.z[c.root][1] = 1.0;
  r.z[c.index.at("a")][2] = r.z[c.index.at("b")][2] = 0.5;
  r.z[c.index.at("c")][3] = 0.5;
  const auto dag = peel_strat(r, c, 3);
  const int k = dag.find(c.index.at("c"), 3);
  ASSERT_GE(k, 0);
  EXPECT_DOUBLE_EQ(dag.nodes[k].prob, 0.5 * 0.25 + 0.5 * 0.75);
  EXPECT_EQ(dag.find(c.index.at("d"), 3), -1);
  // visit order is by depth, then time
  for (std::size_t i = 1; i < dag.nodes.size(); ++i)
    EXPECT_LE(c.depth[dag.nodes[i - 1].state], c.depth[dag.nodes[i].state]);
}

TEST(DecomposeDag, MarginalsCountsAndInvariants) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto inst = gen_random_mab(2, 3 + seed % 4, 3 + seed % 4, seed, std::nullopt, true);
    auto [lp, idx] = build_lp_mabdag(inst);
    const auto sol = solved(lp);
    for (int a = 0; a < 2; ++a) {
      const auto& arm = idx.arms[a];
      double worst_residual = 0.0;
      const auto ds = decompose_dag(sol, idx, a, [&](const ArmResidual& r) {
        auto x = sol.x;
        write_residual(x, idx, a, r);
        worst_residual = std::max(worst_residual, flow_violation(lp, x));
      });
      EXPECT_LE(worst_residual, 1e-7) << "seed " << seed;
      EXPECT_LE(static_cast<long>(ds.size()), long(inst.budget) * inst.budget * arm.size());
      EXPECT_LE(max_gap(dag_marginals(ds, arm.size(), inst.budget), idx.z[a], sol), 1e-6) << "seed " << seed;
      double root = 0.0;
      for (const auto& d : ds) {
        EXPECT_TRUE(check_dag(arm, d).empty()) << "seed " << seed;
        root += d.root().prob;
      }
      EXPECT_LE(root, 1.0 + 1e-7);
    }
  }
}

TEST(DecomposeDag, LayeredTreeGivesSameStrategiesAsForests) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = gen_random_mab(1, 5, 5, seed);
    auto [tlp, tidx] = build_lp_mab(inst);
    const auto tsol = solved(tlp);
    const auto layered = layered_instance(inst);
    auto [dlp, didx] = build_lp_mabdag(layered);
    // carry the tree LP point over to the layered variables ("u@k" -> u)
    LPSolution dsol;
    dsol.x.assign(dlp.num_variables(), 0.0);
    const auto& tarm = tidx.arms[0];
    const auto& darm = didx.arms[0];
    for (int v = 0; v < darm.size(); ++v) {
      const int u = tarm.index.at(darm.ids[v].substr(0, darm.ids[v].find('@')));
      for (int t = 1; t <= inst.budget; ++t) {
        dsol.x[didx.z[0][v][t]] = tsol.x[tidx.z[0][u][t]];
        dsol.x[didx.w[0][v][t]] = tsol.x[tidx.w[0][u][t]];
      }
    }
    ASSERT_LE(check_feasible(dlp, dsol.x), 1e-7);
    std::multiset<std::tuple<std::string, int, long long>> from_trees, from_dags;
    auto key = [](double p) { return std::llround(p * 1e9); };
    for (const auto& f : decompose_tree(tsol, tidx, 0))
      for (int u = 0; u < tarm.size(); ++u)
        if (f.present(u)) from_trees.emplace(tarm.ids[u], f.time[u], key(f.prob[u]));
    for (const auto& d : decompose_dag(dsol, didx, 0))
      for (const auto& n : d.nodes) {
        const auto& id = darm.ids[n.state];
        from_dags.emplace(id.substr(0, id.find('@')), n.time, key(n.prob));
      }
    EXPECT_EQ(from_trees, from_dags) << "seed " << seed;
  }
}
