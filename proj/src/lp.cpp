#include "quasifit/lp.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace quasifit {

namespace {

struct Tableau {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;    // rows x cols
  std::vector<double> rhs;  // kept >= 0
  double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

enum class Step { Done, Pivoted, Unbounded };

struct SimplexCore {
  Tableau t;
  std::vector<std::size_t> basis;  // basic column per row
  std::vector<double> obj;         // reduced costs
  double obj_value = 0.0;
  std::vector<char> usable;        // columns eligible to enter

  void pivot(std::size_t r, std::size_t c) {
    const double inv = 1.0 / t.at(r, c);
    for (std::size_t j = 0; j < t.cols; ++j) t.at(r, j) *= inv;
    t.rhs[r] *= inv;
    t.at(r, c) = 1.0;
    if (t.rhs[r] < 0.0 && t.rhs[r] > -kLpTol) t.rhs[r] = 0.0;
    for (std::size_t i = 0; i < t.rows; ++i) {
      if (i == r) continue;
      const double f = t.at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < t.cols; ++j) t.at(i, j) -= f * t.at(r, j);
      t.at(i, c) = 0.0;
      t.rhs[i] -= f * t.rhs[r];
      if (t.rhs[i] < 0.0 && t.rhs[i] > -kLpTol) t.rhs[i] = 0.0;
    }
    const double f = obj[c];
    if (f != 0.0) {
      obj_value += f * t.rhs[r];
      for (std::size_t j = 0; j < t.cols; ++j) obj[j] -= f * t.at(r, j);
      obj[c] = 0.0;
    }
    basis[r] = c;
  }

  // Bland's rule: entering = lowest-index column with negative reduced cost;
  // leaving = min-ratio row, ties broken by lowest basic column index.
  Step step() {
    std::size_t enter = t.cols;
    for (std::size_t j = 0; j < t.cols; ++j) {
      if (usable[j] && obj[j] < -kLpTol) { enter = j; break; }
    }
    if (enter == t.cols) return Step::Done;
    std::size_t leave = t.rows;
    double best_ratio = kInf;
    for (std::size_t i = 0; i < t.rows; ++i) {
      const double aij = t.at(i, enter);
      if (aij <= kLpTol) continue;
      const double ratio = t.rhs[i] / aij;
      if (ratio < best_ratio - kLpTol ||
          (ratio < best_ratio + kLpTol &&
           (leave == t.rows || basis[i] < basis[leave]))) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == t.rows) return Step::Unbounded;
    pivot(leave, enter);
    return Step::Pivoted;
  }

  void drop_rows(const std::vector<char>& dead) {
    Tableau nt;
    nt.cols = t.cols;
    std::vector<std::size_t> nbasis;
    for (std::size_t i = 0; i < t.rows; ++i) {
      if (dead[i]) continue;
      for (std::size_t j = 0; j < t.cols; ++j) nt.a.push_back(t.at(i, j));
      nt.rhs.push_back(t.rhs[i]);
      nbasis.push_back(basis[i]);
      ++nt.rows;
    }
    t = std::move(nt);
    basis = std::move(nbasis);
  }
};

void check_problem(const LPProblem& p) {
  const std::size_t n = p.num_vars();
  if (p.ineq_a.size() != p.ineq_b.size() || p.eq_a.size() != p.eq_b.size())
    throw std::invalid_argument("lp: constraint matrix/rhs length mismatch");
  for (const auto& row : p.ineq_a)
    if (row.size() != n) throw std::invalid_argument("lp: inequality row width mismatch");
  for (const auto& row : p.eq_a)
    if (row.size() != n) throw std::invalid_argument("lp: equality row width mismatch");
  if (!p.lo.empty() && p.lo.size() != n)
    throw std::invalid_argument("lp: lower bound length mismatch");
  if (!p.hi.empty() && p.hi.size() != n)
    throw std::invalid_argument("lp: upper bound length mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = p.lo.empty() ? -kInf : p.lo[k];
    const double hi = p.hi.empty() ? kInf : p.hi[k];
    if (lo > hi) throw std::invalid_argument("lp: bound with lo > hi");
  }
}

}  // namespace

LPResult solve_lp(const LPProblem& p) {
  check_problem(p);
  const std::size_t n = p.num_vars();

  // Map variables onto nonnegative standard columns: x = offset + sign*s,
  // or s+ - s- for variables free on both sides.
  struct VarMap {
    std::size_t col = 0;
    double sign = 1.0;
    double offset = 0.0;
    bool split = false;
    std::size_t neg_col = 0;
  };
  std::vector<VarMap> vmap(n);
  std::size_t struct_cols = 0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (var, span)
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = p.lo.empty() ? -kInf : p.lo[k];
    const double hi = p.hi.empty() ? kInf : p.hi[k];
    if (lo > -kInf) {
      vmap[k] = {struct_cols++, 1.0, lo, false, 0};
      if (hi < kInf) upper_rows.emplace_back(k, hi - lo);
    } else if (hi < kInf) {
      vmap[k] = {struct_cols++, -1.0, hi, false, 0};
    } else {
      vmap[k] = {struct_cols, 1.0, 0.0, true, struct_cols + 1};
      struct_cols += 2;
    }
  }

  const std::size_t n_ineq = p.ineq_a.size() + upper_rows.size();
  const std::size_t n_eq = p.eq_a.size();
  const std::size_t rows = n_ineq + n_eq;
  const std::size_t cols = struct_cols + n_ineq;  // structural + slacks

  SimplexCore core;
  core.t.rows = rows;
  core.t.cols = cols;
  core.t.a.assign(rows * cols, 0.0);
  core.t.rhs.assign(rows, 0.0);
  core.basis.assign(rows, cols);

  auto emit_row = [&](std::size_t r, const std::vector<double>& coef, double b) {
    for (std::size_t k = 0; k < n; ++k) {
      const double a = coef[k];
      if (a == 0.0) continue;
      const auto& vm = vmap[k];
      core.t.at(r, vm.col) += a * vm.sign;
      if (vm.split) core.t.at(r, vm.neg_col) -= a;
      b -= a * vm.offset;
    }
    core.t.rhs[r] = b;
  };

  std::size_t r = 0;
  for (std::size_t i = 0; i < p.ineq_a.size(); ++i, ++r) {
    emit_row(r, p.ineq_a[i], p.ineq_b[i]);
    core.t.at(r, struct_cols + r) = 1.0;
  }
  for (const auto& [k, span] : upper_rows) {
    core.t.at(r, vmap[k].col) = 1.0;
    core.t.rhs[r] = span;
    core.t.at(r, struct_cols + r) = 1.0;
    ++r;
  }
  for (std::size_t i = 0; i < n_eq; ++i, ++r) emit_row(r, p.eq_a[i], p.eq_b[i]);

  // Normalize rhs >= 0. Rows whose slack got negated and all equality rows
  // need artificial columns to seed the basis.
  std::vector<std::size_t> artificial_rows;
  for (std::size_t i = 0; i < rows; ++i) {
    if (core.t.rhs[i] < 0.0) {
      for (std::size_t j = 0; j < cols; ++j) core.t.at(i, j) = -core.t.at(i, j);
      core.t.rhs[i] = -core.t.rhs[i];
      artificial_rows.push_back(i);
    } else if (i >= n_ineq) {
      artificial_rows.push_back(i);
    } else {
      core.basis[i] = struct_cols + i;
    }
  }

  const std::size_t p1_cols = cols + artificial_rows.size();
  {
    Tableau wide;
    wide.rows = rows;
    wide.cols = p1_cols;
    wide.a.assign(rows * p1_cols, 0.0);
    wide.rhs = core.t.rhs;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) wide.at(i, j) = core.t.at(i, j);
    for (std::size_t k = 0; k < artificial_rows.size(); ++k) {
      wide.at(artificial_rows[k], cols + k) = 1.0;
      core.basis[artificial_rows[k]] = cols + k;
    }
    core.t = std::move(wide);
  }
  core.usable.assign(p1_cols, 1);

  // Phase 1: minimize the sum of artificials.
  core.obj.assign(p1_cols, 0.0);
  core.obj_value = 0.0;
  for (std::size_t k = 0; k < artificial_rows.size(); ++k) core.obj[cols + k] = 1.0;
  for (std::size_t i : artificial_rows) {
    core.obj_value += core.t.rhs[i];
    for (std::size_t j = 0; j < core.t.cols; ++j) core.obj[j] -= core.t.at(i, j);
  }

  const std::size_t max_iter = 2000 + 200 * (rows + cols);
  std::size_t iter = 0;
  while (true) {
    if (++iter > max_iter) return {LPStatus::NumericalFailure, {}, 0.0};
    const Step s = core.step();
    if (s == Step::Done) break;
    if (s == Step::Unbounded) return {LPStatus::NumericalFailure, {}, 0.0};
  }
  if (core.obj_value > kLpPhase1Tol) return {LPStatus::Infeasible, {}, 0.0};

  // Drive remaining artificials out of the basis; rows that resist are
  // redundant and get dropped. Basic artificials sit below the phase-1
  // threshold, so their value is snapped to zero before the pivot.
  std::vector<char> dead(core.t.rows, 0);
  for (std::size_t i = 0; i < core.t.rows; ++i) {
    if (core.basis[i] < cols) continue;
    std::size_t best = cols;
    double best_mag = kLpPhase1Tol;
    for (std::size_t j = 0; j < cols; ++j) {
      const double mag = std::fabs(core.t.at(i, j));
      if (mag > best_mag) { best_mag = mag; best = j; }
    }
    if (best == cols) { dead[i] = 1; continue; }
    core.t.rhs[i] = 0.0;
    core.pivot(i, best);
  }
  core.drop_rows(dead);
  for (std::size_t j = cols; j < p1_cols; ++j) core.usable[j] = 0;

  // Phase 2: real objective over the standardized variables.
  std::vector<double> c_std(p1_cols, 0.0);
  double c_const = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& vm = vmap[k];
    c_std[vm.col] += p.c[k] * vm.sign;
    if (vm.split) c_std[vm.neg_col] -= p.c[k];
    c_const += p.c[k] * vm.offset;
  }
  core.obj = c_std;
  core.obj_value = 0.0;
  for (std::size_t i = 0; i < core.t.rows; ++i) {
    const double cb = c_std[core.basis[i]];
    if (cb == 0.0) continue;
    core.obj_value += cb * core.t.rhs[i];
    for (std::size_t j = 0; j < core.t.cols; ++j)
      core.obj[j] -= cb * core.t.at(i, j);
    core.obj[core.basis[i]] = 0.0;
  }

  while (true) {
    if (++iter > max_iter) return {LPStatus::NumericalFailure, {}, 0.0};
    const Step s = core.step();
    if (s == Step::Done) break;
    if (s == Step::Unbounded) return {LPStatus::Unbounded, {}, 0.0};
  }

  std::vector<double> x_std(cols, 0.0);
  for (std::size_t i = 0; i < core.t.rows; ++i)
    if (core.basis[i] < cols) x_std[core.basis[i]] = core.t.rhs[i];
  LPResult res;
  res.status = LPStatus::Optimal;
  res.x.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& vm = vmap[k];
    double v = vm.offset + vm.sign * x_std[vm.col];
    if (vm.split) v -= x_std[vm.neg_col];
    res.x[k] = v;
  }
  res.objective = core.obj_value + c_const;
  return res;
}

}  // namespace quasifit
