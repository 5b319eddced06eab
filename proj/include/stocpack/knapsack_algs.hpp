#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "stocpack/knapsack_lp.hpp"
#include "stocpack/simplex.hpp"

namespace stocpack {

struct ItemOutcome {
  enum class Kind { ignored, failed_to_start, completed, overflowed, canceled, abandoned };
  Kind kind = Kind::ignored;
  int start = -1;  // units consumed when the item started
  int size = 0;    // realized size if it completed or overflowed
  int steps = 0;   // processing steps (points advanced) in the cancellation model
};

inline const char* to_string(ItemOutcome::Kind k) {
  using K = ItemOutcome::Kind;
  switch (k) {
    case K::ignored: return "ignored";
    case K::failed_to_start: return "failed_to_start";
    case K::completed: return "completed";
    case K::overflowed: return "overflowed";
    case K::canceled: return "canceled";
    case K::abandoned: return "abandoned";
  }
  return "?";
}

struct KnapsackRunResult {
  double reward = 0.0;
  std::vector<ItemOutcome> outcomes;
  int consumed = 0;          // total units processed, may exceed B
  int credited_units = 0;    // units of items whose reward was counted
  bool early_branch = false; // meaningful for the combined pipeline only
};

inline int sample_size(const ItemDist& item, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  int last = 0;
  for (auto [s, p] : item.probs) {
    if (p <= 0.0) continue;
    cum += p;
    last = s;
    if (u < cum) return s;
  }
  return last;
}

// ---------------------------------------------------------- StocK-NoCancel

struct StartTimeSchedule {
  std::vector<std::optional<int>> deadline;  // D_i, nullopt = ignored
  std::vector<int> order;                    // ascending D_i, ties by index
};

namespace detail {
inline void sort_schedule(StartTimeSchedule& s) {
  s.order.clear();
  for (int i = 0; i < static_cast<int>(s.deadline.size()); ++i)
    if (s.deadline[i]) s.order.push_back(i);
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](int a, int b) { return *s.deadline[a] < *s.deadline[b]; });
}
}  // namespace detail

/// D_i = t with probability x*_{i,t}/4, one uniform draw per item.
inline StartTimeSchedule round_nocancel(const LPSolution& sol, const NoCancelLPIndex& idx, Rng& rng) {
  StartTimeSchedule out;
  out.deadline.resize(idx.x.size());
  for (std::size_t i = 0; i < idx.x.size(); ++i) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (int t = 0; t < idx.budget; ++t) {
      cum += std::max(0.0, sol.x[idx.x[i][t]]) / 4.0;
      if (u < cum) {
        out.deadline[i] = t;
        break;
      }
    }
  }
  detail::sort_schedule(out);
  return out;
}

/// Class j w.p. x-bar/4, then a uniform start inside the class; folded into
/// one draw per item.
inline StartTimeSchedule round_poly_nocancel(const LPSolution& sol, const PolyNoCancelIndex& idx, Rng& rng) {
  StartTimeSchedule out;
  out.deadline.resize(idx.x.size());
  for (std::size_t i = 0; i < idx.x.size(); ++i) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (int j = 0; j < idx.classes && !out.deadline[i]; ++j) {
      auto [lo, hi] = idx.class_range(j);
      const double each = std::max(0.0, sol.x[idx.x[i][j]]) / (4.0 * (hi - lo));
      for (int t = lo; t < hi; ++t) {
        cum += each;
        if (u < cum) {
          out.deadline[i] = t;
          break;
        }
      }
    }
  }
  detail::sort_schedule(out);
  return out;
}

inline KnapsackRunResult execute_nocancel(const StocKInstance& inst, const StartTimeSchedule& sch, Rng& rng) {
  KnapsackRunResult r;
  r.outcomes.resize(inst.items.size());
  int occupied = 0;
  for (int i : sch.order) {
    auto& o = r.outcomes[i];
    if (occupied > *sch.deadline[i]) {
      o.kind = ItemOutcome::Kind::failed_to_start;
      continue;
    }
    o.start = occupied;
    o.size = sample_size(inst.items[i], rng);
    occupied += o.size;
    if (occupied <= inst.budget) {
      o.kind = ItemOutcome::Kind::completed;
      r.reward += inst.items[i].reward(o.size);
      r.credited_units += o.size;
    } else {
      o.kind = ItemOutcome::Kind::overflowed;
    }
  }
  r.consumed = occupied;
  return r;
}

// ------------------------------------------------------------ early / late

inline std::pair<StocKInstance, StocKInstance> split_early_late(const StocKInstance& inst) {
  StocKInstance early = inst, late = inst;
  const int half = inst.budget / 2;
  for (auto& it : early.items)
    for (auto& [s, r] : it.rewards)
      if (s > half) r = 0.0;
  for (auto& it : late.items)
    for (auto& [s, r] : it.rewards)
      if (s <= half) r = 0.0;
  return {std::move(early), std::move(late)};
}

// ------------------------------------------------------------- StocK-Small

/// Stop/cancel schedule over "points". Point k means the item has been
/// processed for real_units[k] units without completing.
struct CancelPolicy {
  std::vector<char> keep;
  std::vector<std::vector<double>> q;       // s*/v* - hazard, clamped
  std::vector<std::vector<double>> cancel;  // cancel probability given not completed
  std::vector<std::vector<double>> hazard;  // completion hazard at each point
  std::vector<int> real_units;
  int last_point = 0;  // points 0..last_point take a cancel decision
  std::vector<int> order;
};

namespace detail {

inline CancelPolicy make_cancel_policy(const LPSolution& sol, const SmallLPIndex& idx,
                                       std::vector<std::vector<double>> haz, std::vector<int> real_units,
                                       int last_point, double keep_prob, Rng& rng) {
  const int n = static_cast<int>(idx.v.size());
  CancelPolicy p;
  p.hazard = std::move(haz);
  p.real_units = std::move(real_units);
  p.last_point = last_point;
  p.keep.assign(n, 0);
  p.q.assign(n, std::vector<double>(last_point + 1, 0.0));
  p.cancel = p.q;
  for (int i = 0; i < n; ++i) {
    p.keep[i] = rng.uniform() < keep_prob;
    p.order.push_back(i);
    for (int k = 0; k <= last_point; ++k) {
      const double v = sol.x[idx.v[i][k]], s = sol.x[idx.s[i][k]], h = p.hazard[i][k];
      if (v <= tol::reach) continue;
      const double q = std::clamp(s / v - h, 0.0, 1.0);
      p.q[i][k] = q;
      p.cancel[i][k] = 1.0 - h > 1e-12 ? std::clamp(q / (1.0 - h), 0.0, 1.0) : 0.0;
    }
  }
  return p;
}

}  // namespace detail

inline CancelPolicy round_small(const StocKInstance& inst, const LPSolution& sol, const SmallLPIndex& idx,
                                Rng& rng) {
  const int B = inst.budget, n = static_cast<int>(inst.items.size());
  std::vector<std::vector<double>> haz(n, std::vector<double>(B + 2, 0.0));
  for (int i = 0; i < n; ++i)
    for (int t = 0; t <= B; ++t) haz[i][t] = hazard(inst.items[i], t);
  std::vector<int> units(B + 2);
  std::iota(units.begin(), units.end(), 0);
  return detail::make_cancel_policy(sol, idx, std::move(haz), std::move(units), B / 2, 0.25, rng);
}

inline CancelPolicy round_poly_small(const StocKInstance& inst, const LPSolution& sol,
                                     const PolySmallLPIndex& idx, Rng& rng) {
  int last = 0;
  while (last + 1 < static_cast<int>(idx.point_len.size()) - 1 && idx.point_len[last + 1] <= inst.budget / 2)
    ++last;
  return detail::make_cancel_policy(sol, idx, idx.hazard, idx.real_units, last, 0.125, rng);
}

inline KnapsackRunResult execute_small(const StocKInstance& inst, const CancelPolicy& pol, Rng& rng) {
  using K = ItemOutcome::Kind;
  KnapsackRunResult r;
  r.outcomes.resize(inst.items.size());
  int used = 0;
  for (int i : pol.order) {
    auto& o = r.outcomes[i];
    if (!pol.keep[i]) continue;
    o.start = used;
    const int s = sample_size(inst.items[i], rng);
    o.kind = K::abandoned;
    o.steps = pol.last_point + 1;
    for (int k = 0; k <= pol.last_point; ++k) {
      const double c = pol.cancel[i][k];
      if (c > 0.0 && rng.uniform() < c) {
        o.kind = K::canceled;
        o.steps = k;
        break;
      }
      const int next = pol.real_units[k + 1];
      if (s <= next) {
        used += s - pol.real_units[k];
        o.kind = K::completed;
        o.size = s;
        o.steps = k + 1;
        if (used <= inst.budget) {
          r.reward += inst.items[i].reward(s);
          r.credited_units += s;
        } else {
          o.kind = K::overflowed;
        }
        break;
      }
      used += next - pol.real_units[k];
    }
  }
  r.consumed = used;
  return r;
}

/// Exact law of the point at which a kept item stops under the policy:
/// entries 0..last_point, then the tail mass at last_point + 1.
inline std::vector<double> stopping_law(const CancelPolicy& pol, int i) {
  std::vector<double> law(pol.last_point + 2, 0.0);
  double reach = 1.0;
  for (int k = 0; k <= pol.last_point; ++k) {
    const double h = pol.hazard[i][k], c = pol.cancel[i][k];
    law[k] = reach * (h + (1.0 - h) * c);
    reach *= (1.0 - h) * (1.0 - c);
  }
  law[pol.last_point + 1] = reach;
  return law;
}

// --------------------------------------------------------------- pipelines

class NoCancelPipeline {
 public:
  explicit NoCancelPipeline(StocKInstance inst) : inst_(std::move(inst)) {
    auto built = build_lp_nocancel(inst_);
    lp_ = std::move(built.first);
    idx_ = std::move(built.second);
    sol_ = detail::solve_checked(lp_);
  }
  KnapsackRunResult run(Rng& rng) const { return execute_nocancel(inst_, round_nocancel(sol_, idx_, rng), rng); }
  double lp_opt() const { return sol_.objective_value; }
  const LinearProgram& lp() const { return lp_; }
  const LPSolution& solution() const { return sol_; }
  const NoCancelLPIndex& index() const { return idx_; }
  const StocKInstance& instance() const { return inst_; }

 private:
  StocKInstance inst_;
  LinearProgram lp_;
  NoCancelLPIndex idx_;
  LPSolution sol_;
};

class PolyNoCancelPipeline {
 public:
  explicit PolyNoCancelPipeline(StocKInstance inst) : inst_(std::move(inst)) {
    auto built = build_poly_lp_nocancel(inst_);
    lp_ = std::move(built.first);
    idx_ = std::move(built.second);
    sol_ = detail::solve_checked(lp_);
  }
  KnapsackRunResult run(Rng& rng) const {
    return execute_nocancel(inst_, round_poly_nocancel(sol_, idx_, rng), rng);
  }
  double lp_opt() const { return sol_.objective_value; }
  const LinearProgram& lp() const { return lp_; }
  const LPSolution& solution() const { return sol_; }
  const PolyNoCancelIndex& index() const { return idx_; }

 private:
  StocKInstance inst_;
  LinearProgram lp_;
  PolyNoCancelIndex idx_;
  LPSolution sol_;
};

class SmallPipeline {
 public:
  explicit SmallPipeline(StocKInstance inst) : inst_(std::move(inst)) {
    auto built = build_lp_small(inst_);
    lp_ = std::move(built.first);
    idx_ = std::move(built.second);
    sol_ = detail::solve_checked(lp_);
  }
  CancelPolicy round(Rng& rng) const { return round_small(inst_, sol_, idx_, rng); }
  KnapsackRunResult run(Rng& rng) const { return execute_small(inst_, round(rng), rng); }
  double lp_opt() const { return sol_.objective_value; }
  const LinearProgram& lp() const { return lp_; }
  const LPSolution& solution() const { return sol_; }
  const SmallLPIndex& index() const { return idx_; }
  const StocKInstance& instance() const { return inst_; }

 private:
  StocKInstance inst_;
  LinearProgram lp_;
  SmallLPIndex idx_;
  LPSolution sol_;
};

class PolySmallPipeline {
 public:
  explicit PolySmallPipeline(StocKInstance inst) : inst_(std::move(inst)) {
    auto built = build_poly_lp_small(inst_);
    lp_ = std::move(built.first);
    idx_ = std::move(built.second);
    sol_ = detail::solve_checked(lp_);
  }
  CancelPolicy round(Rng& rng) const { return round_poly_small(inst_, sol_, idx_, rng); }
  KnapsackRunResult run(Rng& rng) const { return execute_small(inst_, round(rng), rng); }
  double lp_opt() const { return sol_.objective_value; }
  const LinearProgram& lp() const { return lp_; }
  const LPSolution& solution() const { return sol_; }
  const PolySmallLPIndex& index() const { return idx_; }

 private:
  StocKInstance inst_;
  LinearProgram lp_;
  PolySmallLPIndex idx_;
  LPSolution sol_;
};

/// The no-cancellation pipeline on a late instance, where cancelling never helps.
inline NoCancelPipeline solve_late(const StocKInstance& late) {
  if (!is_late(late)) throw InvalidInstance("solve_late needs rewards only above B/2");
  return NoCancelPipeline(late);
}

/// Fair coin between the early (LP_S + StocK-Small) and late pipelines.
class StockFullPipeline {
 public:
  explicit StockFullPipeline(const StocKInstance& inst)
      : early_(split_early_late(inst).first), late_(solve_late(split_early_late(inst).second)) {}
  KnapsackRunResult run(Rng& rng) const {
    const bool heads = rng.uniform() < 0.5;
    KnapsackRunResult r = heads ? early_.run(rng) : late_.run(rng);
    r.early_branch = heads;
    return r;
  }
  // Expected value of the combined guarantee: half of each branch's LP.
  double lp_opt() const { return 0.5 * (early_.lp_opt() + late_.lp_opt()); }
  const SmallPipeline& early() const { return early_; }
  const NoCancelPipeline& late() const { return late_; }

 private:
  SmallPipeline early_;
  NoCancelPipeline late_;
};

inline KnapsackRunResult solve_stock_full(const StocKInstance& inst, Rng& rng) {
  return StockFullPipeline(inst).run(rng);
}

}  // namespace stocpack
