#include <gtest/gtest.h>

#include "support.hpp"

using namespace testutil;

namespace {

double lp_value(const std::pair<LinearProgram, MabLPIndex>& built) { return solved(built.first).objective_value; }

}  // namespace

TEST(LpMab, RootOnlyArm) {
  EXPECT_NEAR(lp_value(build_lp_mab(mab(1, {tree_arm("r", {}, {{"r", 1.0}})}))), 1.0, 1e-9);
}

TEST(LpMab, OnePlayPerSlot) {
  const auto inst = mab(1, {tree_arm("r", {}, {{"r", 1.0}}), tree_arm("q", {}, {{"q", 1.0}})});
  EXPECT_NEAR(lp_value(build_lp_mab(inst)), 1.0, 1e-9);
}

TEST(LpMab, RootArrivalPinnedAtSlotOne) {
  auto [lp, idx] = build_lp_mab(gen_random_mab(2, 4, 5, 3));
  for (int a = 0; a < 2; ++a) {
    const int root = idx.arms[a].root;
    EXPECT_EQ(lp.variable(idx.w[a][root][1]).lower, 1.0);
    for (int t = 2; t <= 5; ++t) EXPECT_EQ(lp.variable(idx.w[a][root][t]).upper, 0.0);
  }
}

TEST(LpMab, SolutionInvariants) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = gen_random_mab(2, 4, 6, seed);
    auto [lp, idx] = build_lp_mab(inst);
    const auto s = solved(lp);
    EXPECT_LE(check_feasible(lp, s.x), 1e-7);
    for (int t = 1; t <= inst.budget; ++t) {
      double slot = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int u = 0; u < idx.arms[a].size(); ++u) {
          EXPECT_GE(s.x[idx.z[a][u][t]], -1e-9);
          EXPECT_GE(s.x[idx.w[a][u][t]], -1e-9);
          slot += s.x[idx.z[a][u][t]];
        }
      EXPECT_LE(slot, 1.0 + 1e-7);
    }
    for (int a = 0; a < 2; ++a) EXPECT_EQ(s.x[idx.w[a][idx.arms[a].root][1]], 1.0);
  }
}

TEST(LpMab, ValidAgainstJointOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = gen_random_mab(2, 2 + seed % 3, 2 + seed % 5, seed);
    EXPECT_GE(lp_value(build_lp_mab(inst)), opt_mab(inst).value - 1e-6) << "seed " << seed;
  }
}

TEST(LpMab, RejectsNonTreeArms) {
  auto inst = gen_random_mab(1, 4, 4, 1, std::nullopt, true);
  EXPECT_THROW(build_lp_mab(inst), InvalidInstance);
}

TEST(LpMabDag, LayeredTreeMatchesTreeLp) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto inst = gen_random_mab(2, 4, 5, seed);
    EXPECT_NEAR(lp_value(build_lp_mabdag(layered_instance(inst))), lp_value(build_lp_mab(inst)), 1e-6)
        << "seed " << seed;
  }
}

TEST(LpMabDag, DiamondArrivalSumsInNeighbours) {
  const auto arm = tree_arm("r",
                            {{"r", "a", 0.5}, {"r", "b", 0.5}, {"a", "c", 0.25}, {"a", "d", 0.75},
                             {"b", "c", 0.75}, {"b", "d", 0.25}},
                            {}, ArmShape::layered_dag);
  auto [lp, idx] = build_lp_mabdag(mab(3, {arm}));
  const auto& c = idx.arms[0];
  const int a = c.index.at("a"), b = c.index.at("b"), cc = c.index.at("c");
  bool seen = false;
  for (const auto& con : lp.constraints()) {
    if (con.name != "arrive_0_" + std::to_string(cc) + "_3") continue;
    seen = true;
    std::map<int, double> coef(con.row.begin(), con.row.end());
    EXPECT_EQ(coef.at(idx.w[0][cc][3]), 1.0);
    EXPECT_EQ(coef.at(idx.z[0][a][2]), -0.25);
    EXPECT_EQ(coef.at(idx.z[0][b][2]), -0.75);
    EXPECT_EQ(con.rel, Relation::eq);
  }
  EXPECT_TRUE(seen);
}

TEST(LpMabDag, ValidAgainstJointOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = gen_random_mab(2, 3 + seed % 3, 2 + seed % 4, seed, std::nullopt, true);
    EXPECT_GE(lp_value(build_lp_mabdag(inst)), opt_mab(inst).value - 1e-6) << "seed " << seed;
  }
}

TEST(LpMabDag, GraphArmMustBeLayeredFirst) {
  Arm loop;
  loop.shape = ArmShape::graph;
  loop.root = "u";
  loop.states = {"u"};
  loop.edges = {{"u", "u", 1.0}};
  loop.rewards = {{"u", 1.0}};
  const auto inst = mab(3, {loop});
  EXPECT_THROW(build_lp_mabdag(inst), InvalidInstance);
  EXPECT_NEAR(lp_value(build_lp_mabdag(layered_instance(inst))), 3.0, 1e-9);
  EXPECT_NEAR(opt_mab(inst).value, 3.0, 1e-12);
}

TEST(Lp4, ZeroExploitBudgetGivesZero) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    EXPECT_NEAR(lp_value(build_lp4(gen_random_mab(2, 4, 5, seed, 0))), 0.0, 1e-9);
}

TEST(Lp4, SingleRootExploit) {
  auto [lp, idx] = build_lp4(mab(1, {tree_arm("r", {}, {{"r", 5.0}})}, 1));
  const auto s = solved(lp);
  EXPECT_NEAR(s.objective_value, 5.0, 1e-9);
  EXPECT_NEAR(s.x[idx.x[0][0][1]], 1.0, 1e-9);
}

TEST(Lp4, ValidAgainstExploitOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = gen_random_mab(2, 2 + seed % 3, 2 + seed % 4, seed, 1 + seed % 2);
    EXPECT_GE(lp_value(build_lp4(inst)), opt_mab(inst, MabRewardModel::exploit).value - 1e-6) << "seed " << seed;
  }
}

TEST(Lp4, NeedsExploitBudget) {
  EXPECT_THROW(build_lp4(gen_random_mab(1, 3, 3, 1)), InvalidInstance);
}
