#pragma once

// Per-pipeline certification: LP validity against the exact oracle,
// structural audits of the rounding/decomposition, and 3-sigma Monte Carlo
// checks of the approximation constants.

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "stocpack/harness.hpp"
#include "stocpack/json_io.hpp"
#include "stocpack/knapsack_algs.hpp"
#include "stocpack/mab_pipelines.hpp"
#include "stocpack/oracle.hpp"

namespace stocpack {

enum class CheckStatus { pass, fail, skip };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::skip: return "SKIP";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::skip;
  std::string detail;
};

struct CertifyReport {
  std::vector<CheckResult> checks;

  void add(std::string name, bool ok, std::string detail = {}) {
    checks.push_back({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, std::move(detail)});
  }
  void skip(std::string name, std::string why) {
    checks.push_back({std::move(name), CheckStatus::skip, std::move(why)});
  }
  bool ok() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::fail) return false;
    return true;
  }
};

inline void write_certify_report(const CertifyReport& r, std::ostream& os) {
  for (const auto& c : r.checks) {
    os << to_string(c.status) << ' ' << c.name;
    if (!c.detail.empty()) os << " :: " << c.detail;
    os << '\n';
  }
  os << (r.ok() ? "OVERALL PASS" : "OVERALL FAIL") << '\n';
}

struct CertifyOptions {
  std::string pipeline;
  long trials = 100000;
  std::uint64_t seed = 20120101;
  int threads = 0;
};

// ------------------------------------------------------------ audit helpers

/// max |sum of forest masses - LP value| over the arm's z (or x) entries.
inline double forest_marginal_gap(const std::vector<StrategyForest>& forests, const LPSolution& sol,
                                  const MabLPIndex& idx, int arm, bool exploit) {
  std::vector<StrategyForest> mine;
  for (const auto& f : forests)
    if (f.arm == arm) mine.push_back(f);
  const int ns = idx.arms[arm].size(), B = idx.budget;
  const auto m = forest_marginals(mine, ns, B, exploit);
  const auto& vars = exploit ? idx.x[arm] : idx.z[arm];
  double gap = 0.0;
  for (int u = 0; u < ns; ++u)
    for (int t = 1; t <= B; ++t) gap = std::max(gap, std::abs(m[u][t] - sol.x[vars[u][t]]));
  return gap;
}

inline double dag_marginal_gap(const std::vector<StrategyDag>& dags, const LPSolution& sol, const MabLPIndex& idx,
                               int arm) {
  std::vector<StrategyDag> mine;
  for (const auto& d : dags)
    if (d.arm == arm) mine.push_back(d);
  const int ns = idx.arms[arm].size(), B = idx.budget;
  const auto m = dag_marginals(mine, ns, B);
  double gap = 0.0;
  for (int u = 0; u < ns; ++u)
    for (int t = 1; t <= B; ++t) gap = std::max(gap, std::abs(m[u][t] - sol.x[idx.z[arm][u][t]]));
  return gap;
}

/// Largest deviation between the executed stopping law and (s*, v*).
template <class Pipeline>
double stopping_law_error(const Pipeline& p) {
  Rng rng(0);
  const CancelPolicy pol = p.round(rng);
  const auto& idx = p.index();
  const auto& x = p.solution().x;
  double err = 0.0;
  for (std::size_t i = 0; i < idx.v.size(); ++i) {
    const auto law = stopping_law(pol, static_cast<int>(i));
    for (int k = 0; k <= pol.last_point; ++k) err = std::max(err, std::abs(law[k] - x[idx.s[i][k]]));
    const int tail = pol.last_point + 1;
    if (tail < static_cast<int>(idx.v[i].size())) err = std::max(err, std::abs(law[tail] - x[idx.v[i][tail]]));
  }
  return err;
}

namespace detail {

inline std::string num(double v) { return fmt_g(v, 10); }

template <class Oracle>
void validity_check(CertifyReport& r, const std::string& name, double lp_value, Oracle&& oracle) {
  try {
    const double opt = oracle();
    r.add(name, lp_value >= opt - 1e-6, "LP " + num(lp_value) + " oracle " + num(opt));
  } catch (const GuardExceeded& e) {
    r.skip(name, e.what());
  }
}

inline void mc_check(CertifyReport& r, SimReport& sim, const std::string& name, double reference, double factor) {
  const auto& c = add_check(sim, name, reference, factor);
  r.add(name, c.pass,
        "mean " + num(sim.mean) + " stderr " + num(sim.std_err) + " threshold " + num(factor * reference));
}

// Monte Carlo check against the exact optimum; skipped past the oracle guard.
template <class Oracle>
void opt_mc_check(CertifyReport& r, SimReport& sim, const std::string& name, double factor, Oracle&& oracle) {
  try {
    mc_check(r, sim, name, oracle(), factor);
  } catch (const GuardExceeded& e) {
    r.skip(name, e.what());
  }
}

inline void feasibility_check(CertifyReport& r, const std::string& name, const LinearProgram& lp,
                              const std::vector<double>& x) {
  const double v = check_feasible(lp, x);
  r.add(name, v <= tol::feasibility, "max violation " + num(v));
}

}  // namespace detail

inline CertifyReport certify_stock(const StocKInstance& inst, const CertifyOptions& o) {
  CertifyReport r;
  using detail::num;
  const auto& p = o.pipeline;
  if (p == "nocancel") {
    NoCancelPipeline pipe(inst);
    detail::feasibility_check(r, "lp-feasible", pipe.lp(), pipe.solution().x);
    detail::validity_check(r, "lp-valid", pipe.lp_opt(), [&] { return opt_nocancel(inst).value; });
    auto sim = simulate(pipe, o.trials, o.seed, o.threads);
    detail::mc_check(r, sim, "mean>=LPOpt/8", pipe.lp_opt(), 1.0 / 8);
  } else if (p == "nocancel-poly") {
    NoCancelPipeline full(inst);
    PolyNoCancelPipeline pipe(inst);
    detail::feasibility_check(r, "poly-lp-feasible", pipe.lp(), pipe.solution().x);
    const auto xhat = expand_poly_solution(pipe.solution(), pipe.index(), full.index());
    detail::feasibility_check(r, "expanded-solution-feasible", full.lp(), xhat);
    const double hat = objective_at(full.lp(), xhat);
    r.add("poly>=LPOpt/4", pipe.lp_opt() >= full.lp_opt() / 4 - 1e-9,
          "poly " + num(pipe.lp_opt()) + " LPOpt " + num(full.lp_opt()) + " ratio " +
              num(full.lp_opt() > 0 ? pipe.lp_opt() / full.lp_opt() : 0.0));
    detail::validity_check(r, "lp-valid", full.lp_opt(), [&] { return opt_nocancel(inst).value; });
    auto sim = simulate(pipe, o.trials, o.seed, o.threads);
    detail::mc_check(r, sim, "mean>=value(xhat)/8", hat, 1.0 / 8);
    detail::opt_mc_check(r, sim, "mean>=Opt/16", 1.0 / 16, [&] { return opt_nocancel(inst).value; });
  } else if (p == "small" || p == "small-poly") {
    const bool poly = p == "small-poly";
    const StocKInstance early = is_early(inst) ? inst : split_early_late(inst).first;
    if (!is_early(inst)) r.skip("early-instance", "rewards above B/2 dropped; certifying the early part");
    auto run = [&](const auto& pipe, double factor) {
      detail::feasibility_check(r, "lp-feasible", pipe.lp(), pipe.solution().x);
      const double err = stopping_law_error(pipe);
      r.add("stopping-law-exact", err <= 1e-9, "max error " + num(err));
      detail::validity_check(r, "lp-valid", pipe.lp_opt(), [&] { return opt_cancel(early).value; });
      auto sim = simulate(pipe, o.trials, o.seed, o.threads);
      detail::mc_check(r, sim, poly ? "mean>=LPOpt/16" : "mean>=LPOpt/8", pipe.lp_opt(), factor);
      if (poly) detail::opt_mc_check(r, sim, "mean>=Opt/16", 1.0 / 16, [&] { return opt_cancel(early).value; });
    };
    if (poly) {
      SmallPipeline exact(early);
      PolySmallPipeline pipe(early);
      r.add("poly>=LPOpt", pipe.lp_opt() >= exact.lp_opt() - 1e-6,
            "poly " + num(pipe.lp_opt()) + " LPOpt " + num(exact.lp_opt()));
      run(pipe, 1.0 / 16);
    } else {
      run(SmallPipeline(early), 1.0 / 8);
    }
  } else if (p == "stock-full") {
    StockFullPipeline pipe(inst);
    detail::feasibility_check(r, "early-lp-feasible", pipe.early().lp(), pipe.early().solution().x);
    detail::feasibility_check(r, "late-lp-feasible", pipe.late().lp(), pipe.late().solution().x);
    const double err = stopping_law_error(pipe.early());
    r.add("stopping-law-exact", err <= 1e-9, "max error " + num(err));
    auto sim = simulate(pipe, o.trials, o.seed, o.threads);
    detail::mc_check(r, sim, "mean>=LPOpt/8", pipe.lp_opt(), 1.0 / 8);
    detail::opt_mc_check(r, sim, "mean>=Opt/16", 1.0 / 16, [&] { return opt_cancel(inst).value; });
  } else {
    throw InvalidInstance("pipeline '" + p + "' does not apply to a knapsack instance");
  }
  return r;
}

inline CertifyReport certify_mab(const MABInstance& inst, const CertifyOptions& o) {
  CertifyReport r;
  using detail::num;
  const auto& p = o.pipeline;
  auto forest_audits = [&](const auto& pipe, bool exploit) {
    const auto& idx = pipe.index();
    double gap = 0.0, xgap = 0.0;
    std::vector<std::string> bad;
    for (int a = 0; a < static_cast<int>(idx.arms.size()); ++a) {
      gap = std::max(gap, forest_marginal_gap(pipe.forests(), pipe.solution(), idx, a, false));
      if (exploit) xgap = std::max(xgap, forest_marginal_gap(pipe.forests(), pipe.solution(), idx, a, true));
    }
    for (const auto& f : pipe.forests())
      for (auto& s : check_forest(idx.arms[f.arm], f)) bad.push_back(s);
    r.add("marginals-z", gap <= 1e-6, "max gap " + num(gap));
    if (exploit) r.add("marginals-x", xgap <= 1e-6, "max gap " + num(xgap));
    std::vector<int> count(idx.arms.size(), 0);
    for (const auto& f : pipe.forests()) ++count[f.arm];
    bool within = true;
    for (std::size_t a = 0; a < count.size(); ++a)
      within = within && count[a] <= (exploit ? 2 : 1) * idx.budget * idx.arms[a].size();
    r.add("forest-count-bound", within);
    r.add("forest-invariants", bad.empty(), bad.empty() ? "" : bad.front());
    const auto gf = check_gap_filled(idx.arms, pipe.filled());
    r.add("gapfill-invariants", gf.empty(), gf.empty() ? "" : gf.front());
    if (!exploit) {
      const double ext = max_extent(pipe.filled(), idx.budget);
      r.add("extent<=3", ext <= 3 + 1e-9, "max extent " + num(ext));
    }
  };
  if (p == "mab-tree") {
    MabTreePipeline pipe(inst);
    detail::feasibility_check(r, "lp-feasible", pipe.lp(), pipe.solution().x);
    detail::validity_check(r, "lp-valid", pipe.lp_opt(), [&] { return opt_mab(inst).value; });
    forest_audits(pipe, false);
    auto sim = simulate_mab(pipe, o.trials, o.seed, o.threads);
    detail::mc_check(r, sim, "mean>=LPOpt/48", pipe.lp_opt(), 1.0 / 48);
  } else if (p == "mab-dag") {
    MabDagPipeline pipe(inst);
    detail::feasibility_check(r, "lp-feasible", pipe.lp(), pipe.solution().x);
    detail::validity_check(r, "lp-valid", pipe.lp_opt(), [&] { return opt_mab(inst).value; });
    const auto& idx = pipe.index();
    double gap = 0.0;
    std::vector<std::string> bad;
    for (int a = 0; a < static_cast<int>(idx.arms.size()); ++a)
      gap = std::max(gap, dag_marginal_gap(pipe.dags(), pipe.solution(), idx, a));
    for (const auto& d : pipe.dags())
      for (auto& s : check_dag(idx.arms[d.arm], d)) bad.push_back(s);
    r.add("marginals-z", gap <= 1e-6, "max gap " + num(gap));
    r.add("dag-invariants", bad.empty(), bad.empty() ? "" : bad.front());
    auto sim = simulate_mab(pipe, o.trials, o.seed, o.threads);
    detail::mc_check(r, sim, "mean>=LPOpt/48", pipe.lp_opt(), 1.0 / 48);
  } else if (p == "mab-exploit") {
    MabExploitPipeline pipe(inst);
    detail::feasibility_check(r, "lp-feasible", pipe.lp(), pipe.solution().x);
    detail::validity_check(r, "lp-valid", pipe.lp_opt(),
                           [&] { return opt_mab(inst, MabRewardModel::exploit).value; });
    forest_audits(pipe, true);
    auto sim = simulate_mab(pipe, o.trials, o.seed, o.threads);
    detail::mc_check(r, sim, "mean>=11/576*LPOpt", pipe.lp_opt(), 11.0 / 576);
  } else {
    throw InvalidInstance("pipeline '" + p + "' does not apply to a bandit instance");
  }
  return r;
}

inline CertifyReport certify(const Instance& inst, const CertifyOptions& o) {
  if (const auto* s = std::get_if<StocKInstance>(&inst)) return certify_stock(*s, o);
  return certify_mab(std::get<MABInstance>(inst), o);
}

}  // namespace stocpack
