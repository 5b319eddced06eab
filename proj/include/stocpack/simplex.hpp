#pragma once

// Dense-tableau bounded-variable primal simplex (two phases, Bland's rule).
// Lower bounds are shifted to zero and finite upper bounds are handled by
// bound flipping, so boxes never become explicit rows.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stocpack/lp.hpp"

namespace stocpack {

struct SimplexOptions {
  double pivot_tol = tol::pivot;
  double feas_tol = tol::feasibility;
  double opt_tol = 1e-9;
  std::int64_t max_iterations = 5'000'000;
};

namespace detail {

class Tableau {
 public:
  enum : signed char { kBasic = 0, kLower = 1, kUpper = 2 };

  Tableau(int m, int ncols) : m_(m), n_(ncols), t_(std::size_t(m) * ncols, 0.0) {}

  double& at(int r, int c) { return t_[std::size_t(r) * n_ + c]; }
  double at(int r, int c) const { return t_[std::size_t(r) * n_ + c]; }
  int rows() const { return m_; }
  int cols() const { return n_; }

  std::vector<double> xb, ub, d;
  std::vector<int> basis;
  std::vector<signed char> state;

  void price(const std::vector<double>& cost) {
    d = cost;
    for (int r = 0; r < m_; ++r) {
      const double cb = cost[basis[r]];
      if (cb == 0.0) continue;
      const double* row = &t_[std::size_t(r) * n_];
      for (int j = 0; j < n_; ++j) d[j] -= cb * row[j];
    }
    for (int r = 0; r < m_; ++r) d[basis[r]] = 0.0;
  }

  void pivot(int r, int e) {
    double* pr = &t_[std::size_t(r) * n_];
    const double inv = 1.0 / pr[e];
    for (int j = 0; j < n_; ++j) pr[j] *= inv;
    pr[e] = 1.0;
    for (int k = 0; k < m_; ++k) {
      if (k == r) continue;
      double* pk = &t_[std::size_t(k) * n_];
      const double f = pk[e];
      if (f == 0.0) continue;
      for (int j = 0; j < n_; ++j) pk[j] -= f * pr[j];
      pk[e] = 0.0;
    }
    const double f = d[e];
    if (f != 0.0) {
      for (int j = 0; j < n_; ++j) d[j] -= f * pr[j];
      d[e] = 0.0;
    }
  }

  double value_of(int j) const { return state[j] == kUpper ? ub[j] : 0.0; }

  // Runs primal simplex on the current basis. Returns false if unbounded.
  bool optimize(const std::vector<double>& cost, const std::vector<char>& may_enter,
                const SimplexOptions& opt, std::int64_t& iters) {
    price(cost);
    for (;;) {
      if (++iters > opt.max_iterations)
        throw std::runtime_error("simplex: iteration limit exceeded");
      int e = -1;
      for (int j = 0; j < n_; ++j) {
        if (state[j] == kBasic || !may_enter[j]) continue;
        if ((state[j] == kLower && d[j] > opt.opt_tol && ub[j] > 0.0) ||
            (state[j] == kUpper && d[j] < -opt.opt_tol)) {
          e = j;
          break;
        }
      }
      if (e < 0) return true;
      const double dir = state[e] == kLower ? 1.0 : -1.0;
      double theta = ub[e];
      int leave = -1;
      bool leave_upper = false;
      for (int r = 0; r < m_; ++r) {
        const double alpha = dir * at(r, e);
        double lim;
        bool to_upper;
        if (alpha > opt.pivot_tol) {
          lim = xb[r] / alpha;
          to_upper = false;
        } else if (alpha < -opt.pivot_tol && std::isfinite(ub[basis[r]])) {
          lim = (ub[basis[r]] - xb[r]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        if (lim < 0.0) lim = 0.0;
        const bool better = lim < theta - 1e-12 ||
                            (leave >= 0 && lim <= theta + 1e-12 && basis[r] < basis[leave]);
        if (better) {
          theta = lim;
          leave = r;
          leave_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) return false;
      for (int r = 0; r < m_; ++r) xb[r] -= theta * dir * at(r, e);
      if (leave < 0) {
        state[e] = state[e] == kLower ? kUpper : kLower;
        continue;
      }
      const double entering = state[e] == kLower ? theta : ub[e] - theta;
      const int out = basis[leave];
      state[out] = leave_upper ? kUpper : kLower;
      basis[leave] = e;
      state[e] = kBasic;
      xb[leave] = entering;
      pivot(leave, e);
    }
  }

 private:
  int m_, n_;
  std::vector<double> t_;
};

// Solves the square system M y = b in place by partial-pivot elimination.
inline bool dense_solve(std::vector<double> M, std::vector<double>& b, int n) {
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(M[std::size_t(r) * n + c]) > std::abs(M[std::size_t(p) * n + c])) p = r;
    if (std::abs(M[std::size_t(p) * n + c]) < 1e-13) return false;
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(M[std::size_t(p) * n + j], M[std::size_t(c) * n + j]);
      std::swap(b[p], b[c]);
    }
    const double inv = 1.0 / M[std::size_t(c) * n + c];
    for (int r = c + 1; r < n; ++r) {
      const double f = M[std::size_t(r) * n + c] * inv;
      if (f == 0.0) continue;
      for (int j = c; j < n; ++j) M[std::size_t(r) * n + j] -= f * M[std::size_t(c) * n + j];
      b[r] -= f * b[c];
    }
  }
  for (int c = n - 1; c >= 0; --c) {
    double s = b[c];
    for (int j = c + 1; j < n; ++j) s -= M[std::size_t(c) * n + j] * b[j];
    b[c] = s / M[std::size_t(c) * n + c];
  }
  return true;
}

}  // namespace detail

/// Solves max c'x subject to the LP's rows and boxes.
inline LPSolution solve(const LinearProgram& lp, const SimplexOptions& opt = {}) {
  using detail::Tableau;
  const int nv = lp.num_variables();

  // Column map: x_v = offset_v + sum(sign * y_col).
  struct ColRef { int var; double sign; };
  std::vector<ColRef> cols;
  std::vector<double> col_ub;
  std::vector<double> offset(nv, 0.0);
  std::vector<std::vector<std::pair<int, double>>> var_cols(nv);
  for (int v = 0; v < nv; ++v) {
    const auto& var = lp.variable(v);
    const bool flo = std::isfinite(var.lower), fhi = std::isfinite(var.upper);
    auto add = [&](double sign, double ub) {
      var_cols[v].emplace_back(int(cols.size()), sign);
      cols.push_back({v, sign});
      col_ub.push_back(ub);
    };
    if (flo && fhi && var.lower == var.upper) {
      offset[v] = var.lower;
    } else if (flo) {
      offset[v] = var.lower;
      add(1.0, fhi ? var.upper - var.lower : kInf);
    } else if (fhi) {
      offset[v] = var.upper;
      add(-1.0, kInf);
    } else {
      add(1.0, kInf);
      add(-1.0, kInf);
    }
  }
  const int ns = static_cast<int>(cols.size());

  // Rows over structural columns with constants folded into the rhs.
  struct Row { std::vector<std::pair<int, double>> a; Relation rel; double rhs; };
  std::vector<Row> rows;
  for (const auto& c : lp.constraints()) {
    Row row{{}, c.rel, c.rhs};
    for (auto [v, a] : c.row) {
      row.rhs -= a * offset[v];
      for (auto [col, sign] : var_cols[v]) row.a.emplace_back(col, a * sign);
    }
    bool empty = true;
    for (auto& [col, a] : row.a)
      if (a != 0.0) empty = false;
    if (empty) {
      const double r = row.rhs;
      const bool ok = c.rel == Relation::le   ? r >= -opt.feas_tol
                      : c.rel == Relation::ge ? r <= opt.feas_tol
                                              : std::abs(r) <= opt.feas_tol;
      if (!ok) return {LPStatus::infeasible, 0.0, {}};
      continue;
    }
    rows.push_back(std::move(row));
  }
  const int m = static_cast<int>(rows.size());

  int nslack = 0;
  for (const auto& r : rows) nslack += r.rel != Relation::eq;
  std::vector<int> slack_of(m, -1), art_of(m, -1);
  std::vector<double> sign_of(m, 1.0);
  int next = ns;
  for (int r = 0; r < m; ++r)
    if (rows[r].rel != Relation::eq) slack_of[r] = next++;
  int nart = 0;
  for (int r = 0; r < m; ++r) {
    sign_of[r] = rows[r].rhs < 0.0 ? -1.0 : 1.0;
    const double slack_coef = rows[r].rel == Relation::le ? 1.0 : -1.0;
    const bool slack_basic = slack_of[r] >= 0 && slack_coef * sign_of[r] > 0.0;
    if (!slack_basic) art_of[r] = next + nart++;
  }
  const int N = ns + nslack + nart;

  Tableau T(m, N);
  T.ub.assign(N, kInf);
  for (int j = 0; j < ns; ++j) T.ub[j] = col_ub[j];
  T.state.assign(N, Tableau::kLower);
  T.basis.assign(m, -1);
  T.xb.assign(m, 0.0);
  std::vector<double> b0(m);
  for (int r = 0; r < m; ++r) {
    const double s = sign_of[r];
    for (auto [col, a] : rows[r].a) T.at(r, col) += s * a;
    if (slack_of[r] >= 0) T.at(r, slack_of[r]) = s * (rows[r].rel == Relation::le ? 1.0 : -1.0);
    b0[r] = s * rows[r].rhs;
    const int basic = art_of[r] >= 0 ? art_of[r] : slack_of[r];
    if (art_of[r] >= 0) T.at(r, art_of[r]) = 1.0;
    T.basis[r] = basic;
    T.state[basic] = Tableau::kBasic;
    T.xb[r] = b0[r];
  }
  const Tableau original = T;  // untouched columns for the final refinement

  std::int64_t iters = 0;
  std::vector<char> may_enter(N, 1);
  if (nart > 0) {
    std::vector<double> cost(N, 0.0);
    for (int r = 0; r < m; ++r)
      if (art_of[r] >= 0) cost[art_of[r]] = -1.0;
    T.optimize(cost, may_enter, opt, iters);
    double infeas = 0.0, scale = 1.0;
    for (int r = 0; r < m; ++r) {
      scale = std::max(scale, std::abs(b0[r]));
      if (T.basis[r] >= ns + nslack) infeas += T.xb[r];
    }
    if (infeas > opt.feas_tol * scale) return {LPStatus::infeasible, 0.0, {}};
    for (int j = ns + nslack; j < N; ++j) {
      T.ub[j] = 0.0;
      may_enter[j] = 0;
    }
    // Drive zero-valued artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (T.basis[r] < ns + nslack) continue;
      for (int j = 0; j < ns + nslack; ++j) {
        if (T.state[j] == Tableau::kBasic || std::abs(T.at(r, j)) <= 1e-7) continue;
        const int out = T.basis[r];
        T.state[out] = Tableau::kLower;
        T.basis[r] = j;
        T.xb[r] = T.value_of(j);
        T.state[j] = Tableau::kBasic;
        T.d.assign(N, 0.0);
        T.pivot(r, j);
        break;
      }
    }
  }

  std::vector<double> cost(N, 0.0);
  for (int j = 0; j < ns; ++j) cost[j] = lp.objective()[cols[j].var] * cols[j].sign;
  if (!T.optimize(cost, may_enter, opt, iters)) return {LPStatus::unbounded, 0.0, {}};

  // Recompute basic values from the original columns for accuracy.
  std::vector<double> colval(N, 0.0);
  for (int j = 0; j < N; ++j)
    if (T.state[j] != Tableau::kBasic) colval[j] = T.value_of(j);
  std::vector<double> rhs = b0;
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < N; ++j)
      if (colval[j] != 0.0) rhs[r] -= original.at(r, j) * colval[j];
  std::vector<double> Bm(std::size_t(m) * m);
  for (int r = 0; r < m; ++r)
    for (int k = 0; k < m; ++k) Bm[std::size_t(r) * m + k] = original.at(r, T.basis[k]);
  if (detail::dense_solve(std::move(Bm), rhs, m)) {
    for (int k = 0; k < m; ++k) colval[T.basis[k]] = rhs[k];
  } else {
    for (int k = 0; k < m; ++k) colval[T.basis[k]] = T.xb[k];
  }

  LPSolution sol;
  sol.status = LPStatus::optimal;
  sol.x.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    double x = offset[v];
    for (auto [col, sign] : var_cols[v]) x += sign * std::clamp(colval[col], 0.0, T.ub[col]);
    const auto& var = lp.variable(v);
    sol.x[v] = std::clamp(x, var.lower, var.upper);
  }
  sol.objective_value = objective_at(lp, sol.x);
  return sol;
}

namespace detail {
// Solve and insist on an optimal basis; every LP built here is bounded and feasible.
inline LPSolution solve_checked(const LinearProgram& lp) {
  LPSolution s = solve(lp);
  if (s.status != LPStatus::optimal)
    throw std::runtime_error(std::string("LP not optimal: ") + to_string(s.status));
  return s;
}
}  // namespace detail

}  // namespace stocpack
