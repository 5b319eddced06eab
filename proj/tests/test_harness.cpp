#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace testutil;

namespace {

struct Constant {
  double value;
  KnapsackRunResult run(Rng&) const {
    KnapsackRunResult r;
    r.reward = value;
    return r;
  }
};

}  // namespace

TEST(Harness, DeterministicRewardHasZeroStdErr) {
  auto rep = simulate(Constant{2.5}, 1000, 1, 2);
  EXPECT_EQ(rep.trials, 1000);
  EXPECT_DOUBLE_EQ(rep.mean, 2.5);
  EXPECT_EQ(rep.std_err, 0.0);
  EXPECT_EQ(rep.ci95, 0.0);
}

TEST(Harness, StdErrOfKnownSample) {
  const auto rep = summarize({0.0, 1.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(rep.mean, 0.5);
  // sample sd = sqrt(1/3), divided by sqrt(4)
  EXPECT_NEAR(rep.std_err, std::sqrt(1.0 / 3) / 2, 1e-15);
  EXPECT_NEAR(rep.ci95, 1.96 * rep.std_err, 1e-15);
}

TEST(Harness, ThreadCountDoesNotChangeResults) {
  StockFullPipeline pipe(gen_random_stock(5, 10, 3, 4));
  const auto one = simulate(pipe, 20000, 77, 1);
  for (int threads : {2, 3, 8}) {
    const auto many = simulate(pipe, 20000, 77, threads);
    EXPECT_EQ(one.mean, many.mean) << threads;
    EXPECT_EQ(one.std_err, many.std_err) << threads;
  }
  MabTreePipeline mp(gen_random_mab(2, 4, 5, 2));
  const auto a = simulate_mab(mp, 20000, 5, 1), b = simulate_mab(mp, 20000, 5, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.per_state_frequency, b.per_state_frequency);
}

TEST(Harness, ThreadsFromEnvironment) {
  ::setenv("STOCPACK_THREADS", "3", 1);
  EXPECT_EQ(harness_threads(), 3);
  ::setenv("STOCPACK_THREADS", "junk", 1);
  EXPECT_GE(harness_threads(), 1);
  ::unsetenv("STOCPACK_THREADS");
}

TEST(Harness, CheckUsesThreeStdErrSlack) {
  SimReport r;
  r.mean = 1.0;
  r.std_err = 0.1;
  EXPECT_TRUE(add_check(r, "ok", 10.0, 0.13).pass);   // 1.3 <= 1.3
  EXPECT_FALSE(add_check(r, "no", 10.0, 0.14).pass);  // 1.4 > 1.3
  EXPECT_NEAR(r.comparisons[0].ratio, 0.1, 1e-15);
  EXPECT_FALSE(r.all_pass());
}

TEST(Harness, CsvLayout) {
  SimReport r;
  r.trials = 10;
  r.mean = 0.5;
  r.std_err = 0.25;
  add_check(r, "mean>=LPOpt/8", 2.0, 0.125);
  std::ostringstream os;
  write_csv(r, os);
  EXPECT_EQ(os.str(),
            "check,mean,stderr,reference,ratio,verdict\n"
            "trials=10,0.5,0.25,0,0,INFO\n"
            "mean>=LPOpt/8,0.5,0.25,0.25,2,PASS\n");
}

TEST(Harness, FrequenciesArePlaysPerTrial) {
  const auto inst = mab(1, {tree_arm("r", {}, {{"r", 1.0}})});
  MabTreePipeline pipe(inst);
  const auto rep = simulate_mab(pipe, 48000, 3, 2);
  // the root is played exactly when its strategy is sampled: 1/24
  EXPECT_NEAR(rep.per_state_frequency.at("r"), 1.0 / 24, 4 * std::sqrt((1.0 / 24) * (23.0 / 24) / 48000));
}

TEST(Generators, ValidAndSeedStable) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = gen_random_stock(1 + seed % 6, 1 + seed % 12, 1 + seed % 4, seed);
    EXPECT_TRUE(validate_stock(s).empty());
    EXPECT_EQ(dump_instance(s), dump_instance(gen_random_stock(1 + seed % 6, 1 + seed % 12, 1 + seed % 4, seed)));
    const auto m = gen_random_mab(1 + seed % 3, 1 + seed % 6, 1 + seed % 8, seed, std::nullopt, seed % 2 == 0);
    EXPECT_TRUE(validate_mab(m).empty());
    EXPECT_EQ(dump_instance(m),
              dump_instance(gen_random_mab(1 + seed % 3, 1 + seed % 6, 1 + seed % 8, seed, std::nullopt, seed % 2 == 0)));
  }
  EXPECT_NE(dump_instance(gen_random_stock(4, 8, 2, 1)), dump_instance(gen_random_stock(4, 8, 2, 2)));
}

TEST(Generators, FamiliesAreValid) {
  for (int n : {4, 6, 8}) EXPECT_TRUE(validate_stock(gen_cancel_benefit(n)).empty());
  for (int n : {2, 4, 7}) EXPECT_TRUE(validate_stock(gen_correlated_gap(n)).empty());
  EXPECT_TRUE(validate_mab(gen_preemption_gap(2, 3, 1)).empty());
  EXPECT_TRUE(validate_mab(gen_preemption_gap(2, 3, 2)).empty());
  EXPECT_THROW(gen_cancel_benefit(5), InvalidInstance);
  EXPECT_THROW(gen_preemption_gap(2, 2, 1), InvalidInstance);
  EXPECT_THROW(gen_preemption_gap(2, 3, 2, 8), InvalidInstance);
}
