#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace testutil;

TEST(ValidateStock, SingleSureItemIsValid) {
  EXPECT_TRUE(validate_stock(stock(1, {item({{1, 1.0, 5.0}})})).empty());
}

TEST(ValidateStock, MassAboveOneNamesItemAndSum) {
  const auto v = validate_stock(stock(4, {item({{1, 0.6, 0.0}, {2, 0.6, 0.0}})}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "item 0: probability mass 1.2 ≠ 1");
}

TEST(ValidateStock, SizeZeroMassIsRejected) {
  const auto v = validate_stock(stock(4, {item({{0, 1.0, 0.0}})}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "item 0: size 0 has positive mass");
}

TEST(ValidateStock, ReportsEveryOffendingItem) {
  const auto v = validate_stock(stock(2, {item({{1, 1.0, 1.0}}), item({{3, 1.0, 1.0}}), item({{1, 1.0, -1.0}})}));
  EXPECT_EQ(v.size(), 2u);
  EXPECT_NE(v[0].find("item 1"), std::string::npos);
  EXPECT_NE(v[1].find("item 2"), std::string::npos);
}

TEST(ValidateStock, RequireValidThrows) {
  EXPECT_THROW(require_valid(stock(4, {item({{1, 0.5, 0.0}})})), InvalidInstance);
}

TEST(ValidateMab, RootOnlyArmIsValid) {
  EXPECT_TRUE(validate_mab(mab(1, {tree_arm("r", {}, {{"r", 1.0}})})).empty());
}

TEST(ValidateMab, OutMassBelowOneIsOneViolation) {
  const auto v = validate_mab(mab(2, {tree_arm("r", {{"r", "a", 0.5}, {"r", "b", 0.4}}, {})}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("out-probability sum 0.9"), std::string::npos);
}

TEST(ValidateMab, SharedStateIdIsOneViolation) {
  const auto v = validate_mab(mab(2, {tree_arm("r", {}, {}), tree_arm("r", {}, {})}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "state id 'r' shared by arms 0 and 1");
}

TEST(ValidateMab, TreeWithTwoParentsIsRejected) {
  auto a = tree_arm("r", {{"r", "a", 0.5}, {"r", "b", 0.5}, {"a", "c", 1.0}, {"b", "c", 1.0}}, {});
  EXPECT_FALSE(validate_mab(mab(3, {a})).empty());
  a.shape = ArmShape::layered_dag;
  EXPECT_TRUE(validate_mab(mab(3, {a})).empty());
}

TEST(ValidateMab, LayeredDagMayNotSkipLayers) {
  auto a = tree_arm("r", {{"r", "a", 0.5}, {"r", "c", 0.5}, {"a", "c", 1.0}}, {}, ArmShape::layered_dag);
  EXPECT_FALSE(validate_mab(mab(3, {a})).empty());
}

TEST(CompileArm, DepthParentAndPathProbability) {
  const auto c = compile_arm(tree_arm("r", {{"r", "a", 0.25}, {"r", "b", 0.75}, {"b", "c", 1.0}}, {{"c", 2.0}}));
  const int r = c.index.at("r"), b = c.index.at("b"), cc = c.index.at("c");
  EXPECT_EQ(c.depth[cc], 2);
  EXPECT_EQ(c.parent(cc), b);
  EXPECT_EQ(c.parent(r), -1);
  EXPECT_DOUBLE_EQ(c.path_prob[cc], 0.75);
  EXPECT_DOUBLE_EQ(c.reward[cc], 2.0);
}

TEST(LayerDag, TreeArmKeepsRewardsPerDepth) {
  const auto a = tree_arm("r", {{"r", "a", 0.5}, {"r", "b", 0.5}, {"a", "c", 1.0}}, {{"r", 1}, {"a", 2}, {"c", 3}});
  const Arm l = layer_dag(a, 3);
  EXPECT_LE(l.states.size(), 3 * a.states.size());
  EXPECT_TRUE(validate_mab(mab(3, {l})).empty());
  const auto c = compile_arm(l);
  std::multiset<std::pair<int, double>> got, want{{0, 1}, {1, 2}, {1, 0}, {2, 3}};
  for (int u = 0; u < c.size(); ++u) got.insert({c.depth[u], c.reward[u]});
  EXPECT_EQ(got, want);
}

TEST(LayerDag, SelfLoopBecomesChain) {
  Arm a;
  a.shape = ArmShape::graph;
  a.root = "u";
  a.states = {"u"};
  a.edges = {{"u", "u", 1.0}};
  const Arm l = layer_dag(a, 3);
  EXPECT_EQ(l.states, (std::vector<std::string>{"u@1", "u@2", "u@3"}));
  ASSERT_EQ(l.edges.size(), 2u);
  EXPECT_EQ(l.edges[0].from, "u@1");
  EXPECT_EQ(l.edges[1].to, "u@3");
}

TEST(LayerDag, DiamondMergesIntoOneState) {
  Arm a;
  a.shape = ArmShape::graph;
  a.root = "r";
  a.states = {"r", "a", "b", "c"};
  a.edges = {{"r", "a", 0.5}, {"r", "b", 0.5}, {"a", "c", 1.0}, {"b", "c", 1.0}};
  const Arm l = layer_dag(a, 3);
  // brute force: reachable (state, layer) pairs and the in-degree of (c,3)
  std::set<std::string> want{"r@1", "a@2", "b@2", "c@3"};
  EXPECT_EQ(std::set<std::string>(l.states.begin(), l.states.end()), want);
  int into_c = 0;
  for (const auto& e : l.edges) into_c += e.to == "c@3";
  EXPECT_EQ(into_c, 2);
}

TEST(Rng, TrialSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(trial_seed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
  Rng a(3), b(3);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a.uniform(), b.uniform());
}
