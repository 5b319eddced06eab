#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stocpack/common.hpp"

namespace stocpack {

enum class Relation { le, eq, ge };

using SparseRow = std::vector<std::pair<int, double>>;

/// Maximisation LP with boxed variables and sparse rows.
class LinearProgram {
 public:
  struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
  };
  struct Constraint {
    SparseRow row;
    Relation rel = Relation::le;
    double rhs = 0.0;
    std::string name;
  };

  int add_variable(std::string name, double lower = 0.0, double upper = kInf) {
    if (!(lower <= upper)) throw std::invalid_argument("variable " + name + ": lower > upper");
    if (names_.count(name)) throw std::invalid_argument("duplicate variable " + name);
    const int id = static_cast<int>(vars_.size());
    names_.emplace(name, id);
    vars_.push_back({std::move(name), lower, upper});
    objective_.push_back(0.0);
    return id;
  }

  void set_objective(int var, double coef) {
    check_var(var);
    if (!std::isfinite(coef)) throw std::invalid_argument("non-finite objective coefficient");
    objective_[var] = coef;
  }
  void add_objective(int var, double coef) { set_objective(var, objective_.at(var) + coef); }

  int add_constraint(SparseRow row, Relation rel, double rhs, std::string name = {}) {
    for (auto [v, a] : row) {
      check_var(v);
      if (!std::isfinite(a)) throw std::invalid_argument("non-finite constraint coefficient");
    }
    if (!std::isfinite(rhs)) throw std::invalid_argument("non-finite right-hand side");
    if (name.empty()) name = "c" + std::to_string(cons_.size());
    cons_.push_back({std::move(row), rel, rhs, std::move(name)});
    return static_cast<int>(cons_.size()) - 1;
  }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(cons_.size()); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  const std::vector<double>& objective() const { return objective_; }
  Variable& variable(int v) { return vars_.at(v); }
  const Variable& variable(int v) const { return vars_.at(v); }

  int index_of(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end()) throw std::out_of_range("unknown variable " + name);
    return it->second;
  }

 private:
  void check_var(int v) const {
    if (v < 0 || v >= num_variables()) throw std::out_of_range("variable index out of range");
  }
  std::vector<Variable> vars_;
  std::unordered_map<std::string, int> names_;
  std::vector<double> objective_;
  std::vector<Constraint> cons_;
};

enum class LPStatus { optimal, infeasible, unbounded };

inline const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
  }
  return "?";
}

struct LPSolution {
  LPStatus status = LPStatus::infeasible;
  double objective_value = 0.0;
  std::vector<double> x;  // indexed like LinearProgram::variables()

  double operator[](int v) const { return x.at(v); }
};

inline std::map<std::string, double> named_values(const LinearProgram& lp, const LPSolution& s) {
  std::map<std::string, double> out;
  for (int v = 0; v < lp.num_variables(); ++v) out[lp.variable(v).name] = s.x.at(v);
  return out;
}

inline double row_activity(const SparseRow& row, const std::vector<double>& x) {
  double a = 0.0;
  for (auto [v, c] : row) a += c * x[v];
  return a;
}

/// Largest violation of any bound or constraint at point x.
inline double check_feasible(const LinearProgram& lp, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != lp.num_variables())
    throw std::invalid_argument("check_feasible: value vector size mismatch");
  double worst = 0.0;
  for (int v = 0; v < lp.num_variables(); ++v) {
    const auto& var = lp.variable(v);
    worst = std::max({worst, var.lower - x[v], x[v] - var.upper});
  }
  for (const auto& c : lp.constraints()) {
    const double a = row_activity(c.row, x);
    switch (c.rel) {
      case Relation::le: worst = std::max(worst, a - c.rhs); break;
      case Relation::ge: worst = std::max(worst, c.rhs - a); break;
      case Relation::eq: worst = std::max(worst, std::abs(a - c.rhs)); break;
    }
  }
  return worst;
}

inline double check_feasible(const LinearProgram& lp, const std::map<std::string, double>& values) {
  std::vector<double> x(lp.num_variables(), 0.0);
  std::vector<char> seen(x.size(), 0);
  for (const auto& [name, val] : values) {
    const int v = lp.index_of(name);  // throws on unknown name
    x[v] = val;
    seen[v] = 1;
  }
  for (std::size_t v = 0; v < seen.size(); ++v)
    if (!seen[v]) throw std::invalid_argument("check_feasible: no value for " + lp.variable(int(v)).name);
  return check_feasible(lp, x);
}

inline double objective_at(const LinearProgram& lp, const std::vector<double>& x) {
  double s = 0.0;
  for (int v = 0; v < lp.num_variables(); ++v) s += lp.objective()[v] * x[v];
  return s;
}

/// Lagrangian dual written as a maximisation: its optimum is the negated
/// primal optimum. Finite variable bounds become dual multipliers.
inline LinearProgram dual_lp(const LinearProgram& lp) {
  LinearProgram d;
  const int n = lp.num_variables();
  std::vector<SparseRow> cols(n);
  for (int r = 0; r < lp.num_constraints(); ++r) {
    const auto& c = lp.constraints()[r];
    double lo = -kInf, hi = kInf;
    if (c.rel == Relation::le) lo = 0.0;
    if (c.rel == Relation::ge) hi = 0.0;
    const int y = d.add_variable("y" + std::to_string(r), lo, hi);
    d.set_objective(y, -c.rhs);
    for (auto [v, a] : c.row) cols[v].emplace_back(y, a);
  }
  for (int v = 0; v < n; ++v) {
    const auto& var = lp.variable(v);
    if (std::isfinite(var.upper)) {
      const int mu = d.add_variable("mu" + std::to_string(v), 0.0, kInf);
      d.set_objective(mu, -var.upper);
      cols[v].emplace_back(mu, 1.0);
    }
    if (std::isfinite(var.lower)) {
      const int nu = d.add_variable("nu" + std::to_string(v), 0.0, kInf);
      d.set_objective(nu, var.lower);
      cols[v].emplace_back(nu, -1.0);
    }
    d.add_constraint(std::move(cols[v]), Relation::eq, lp.objective()[v], "dual" + std::to_string(v));
  }
  return d;
}

/// Writes the LP in CPLEX LP text format.
inline void write_lp_format(const LinearProgram& lp, std::ostream& os) {
  os.precision(17);
  auto term_list = [&](const SparseRow& row) {
    bool first = true;
    for (auto [v, a] : row) {
      if (a == 0.0) continue;
      os << (a < 0 ? (first ? "-" : " - ") : (first ? "" : " + ")) << std::abs(a) << ' '
         << lp.variable(v).name;
      first = false;
    }
    if (first && lp.num_variables() > 0) os << "0 " << lp.variable(0).name;
  };
  os << "\\ exported by stocpack\nMaximize\n obj: ";
  SparseRow obj;
  for (int v = 0; v < lp.num_variables(); ++v)
    if (lp.objective()[v] != 0.0) obj.emplace_back(v, lp.objective()[v]);
  term_list(obj);
  os << "\nSubject To\n";
  for (const auto& c : lp.constraints()) {
    os << ' ' << c.name << ": ";
    term_list(c.row);
    os << (c.rel == Relation::le ? " <= " : c.rel == Relation::ge ? " >= " : " = ") << c.rhs << '\n';
  }
  os << "Bounds\n";
  for (const auto& var : lp.variables()) {
    const bool flo = std::isfinite(var.lower), fhi = std::isfinite(var.upper);
    if (flo && fhi && var.lower == var.upper)
      os << ' ' << var.name << " = " << var.lower << '\n';
    else if (flo && fhi)
      os << ' ' << var.lower << " <= " << var.name << " <= " << var.upper << '\n';
    else if (flo)
      os << ' ' << var.name << " >= " << var.lower << '\n';
    else if (fhi)
      os << " -inf <= " << var.name << " <= " << var.upper << '\n';
    else
      os << ' ' << var.name << " free\n";
  }
  os << "End\n";
}

}  // namespace stocpack
