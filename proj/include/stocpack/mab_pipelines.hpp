#pragma once

// End-to-end bandit pipelines: solve the LP once, decompose once, then draw
// independent plays.

#include <vector>

#include "stocpack/scheduler.hpp"
#include "stocpack/simplex.hpp"

namespace stocpack {

/// Tree arms: LP_mab, forest peeling, GapFill, AlgMAB.
class MabTreePipeline {
 public:
  explicit MabTreePipeline(MABInstance inst) : inst_(std::move(inst)) {
    auto built = build_lp_mab(inst_);
    lp_ = std::move(built.first);
    idx_ = std::move(built.second);
    sol_ = detail::solve_checked(lp_);
    for (int a = 0; a < static_cast<int>(idx_.arms.size()); ++a)
      for (auto& f : decompose_tree(sol_, idx_, a)) forests_.push_back(std::move(f));
    filled_ = gap_fill(idx_.arms, forests_, inst_.budget);
  }
  PlayTrace trace(Rng& rng) const { return alg_mab(idx_.arms, filled_, inst_.budget, rng); }
  double lp_opt() const { return sol_.objective_value; }
  const LinearProgram& lp() const { return lp_; }
  const LPSolution& solution() const { return sol_; }
  const MabLPIndex& index() const { return idx_; }
  const std::vector<StrategyForest>& forests() const { return forests_; }
  const std::vector<GapFilledForest>& filled() const { return filled_; }

 private:
  MABInstance inst_;
  LinearProgram lp_;
  MabLPIndex idx_;
  LPSolution sol_;
  std::vector<StrategyForest> forests_;
  std::vector<GapFilledForest> filled_;
};

/// Arbitrary transition graphs: layer the arms, LP_mabdag, strategy DAGs,
/// ImplicitPlay. Tree and layered arms are used as given.
class MabDagPipeline {
 public:
  explicit MabDagPipeline(const MABInstance& inst) : inst_(inst) {
    for (auto& a : inst_.arms)
      if (a.shape == ArmShape::graph) a = layer_dag(a, inst_.budget);
    auto built = build_lp_mabdag(inst_);
    lp_ = std::move(built.first);
    idx_ = std::move(built.second);
    sol_ = detail::solve_checked(lp_);
    for (int a = 0; a < static_cast<int>(idx_.arms.size()); ++a)
      for (auto& d : decompose_dag(sol_, idx_, a)) dags_.push_back(std::move(d));
  }
  PlayTrace trace(Rng& rng) const { return implicit_play(idx_.arms, dags_, inst_.budget, rng); }
  double lp_opt() const { return sol_.objective_value; }
  const LinearProgram& lp() const { return lp_; }
  const LPSolution& solution() const { return sol_; }
  const MabLPIndex& index() const { return idx_; }
  const std::vector<StrategyDag>& dags() const { return dags_; }
  const MABInstance& layered() const { return inst_; }

 private:
  MABInstance inst_;
  LinearProgram lp_;
  MabLPIndex idx_;
  LPSolution sol_;
  std::vector<StrategyDag> dags_;
};

/// Budgeted exploitation: LP4, pull/exploit forests, GapFill, exploit-aware play.
class MabExploitPipeline {
 public:
  explicit MabExploitPipeline(MABInstance inst) : inst_(std::move(inst)) {
    auto built = build_lp4(inst_);
    lp_ = std::move(built.first);
    idx_ = std::move(built.second);
    sol_ = detail::solve_checked(lp_);
    for (int a = 0; a < static_cast<int>(idx_.arms.size()); ++a)
      for (auto& f : decompose_exploit(sol_, idx_, a)) forests_.push_back(std::move(f));
    filled_ = gap_fill(idx_.arms, forests_, inst_.budget);
  }
  PlayTrace trace(Rng& rng) const {
    return alg_mab_exploit(idx_.arms, filled_, inst_.budget, *inst_.exploit_budget, rng);
  }
  double lp_opt() const { return sol_.objective_value; }
  const LinearProgram& lp() const { return lp_; }
  const LPSolution& solution() const { return sol_; }
  const MabLPIndex& index() const { return idx_; }
  const std::vector<StrategyForest>& forests() const { return forests_; }
  const std::vector<GapFilledForest>& filled() const { return filled_; }

 private:
  MABInstance inst_;
  LinearProgram lp_;
  MabLPIndex idx_;
  LPSolution sol_;
  std::vector<StrategyForest> forests_;
  std::vector<GapFilledForest> filled_;
};

}  // namespace stocpack
