#include "quasifit/qp.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace quasifit {

namespace {

// Constraints are handled internally as n.x >= d.
struct Constraint {
  std::vector<double> n;
  double d = 0.0;
};

// Dense Cholesky solve of S y = w; returns false if S is not numerically PD.
bool cholesky_solve(std::vector<double>& s, std::size_t k, std::vector<double>& w) {
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = s[i * k + j];
      for (std::size_t m = 0; m < j; ++m) sum -= s[i * k + m] * s[j * k + m];
      if (i == j) {
        if (sum <= 1e-14) return false;
        s[i * k + i] = std::sqrt(sum);
      } else {
        s[i * k + j] = sum / s[j * k + j];
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    double sum = w[i];
    for (std::size_t m = 0; m < i; ++m) sum -= s[i * k + m] * w[m];
    w[i] = sum / s[i * k + i];
  }
  for (std::size_t i = k; i-- > 0;) {
    double sum = w[i];
    for (std::size_t m = i + 1; m < k; ++m) sum -= s[m * k + i] * w[m];
    w[i] = sum / s[i * k + i];
  }
  return true;
}

}  // namespace

QPResult solve_qp(const QPProblem& p) {
  const std::size_t n = p.num_vars();
  if (n == 0) throw std::invalid_argument("qp: empty problem");
  if (p.c.size() != n) throw std::invalid_argument("qp: linear term length mismatch");
  for (double qi : p.q)
    if (!(qi > 0.0)) throw std::invalid_argument("qp: diagonal must be strictly positive");
  if (p.ineq_a.size() != p.ineq_b.size())
    throw std::invalid_argument("qp: constraint matrix/rhs length mismatch");
  for (const auto& row : p.ineq_a)
    if (row.size() != n) throw std::invalid_argument("qp: constraint row width mismatch");
  if (!p.lo.empty() && p.lo.size() != n)
    throw std::invalid_argument("qp: lower bound length mismatch");
  if (!p.hi.empty() && p.hi.size() != n)
    throw std::invalid_argument("qp: upper bound length mismatch");

  std::vector<Constraint> cons;
  cons.reserve(p.ineq_a.size() + 2 * n);
  for (std::size_t i = 0; i < p.ineq_a.size(); ++i) {
    Constraint c;
    c.n.resize(n);
    for (std::size_t j = 0; j < n; ++j) c.n[j] = -p.ineq_a[i][j];
    c.d = -p.ineq_b[i];
    cons.push_back(std::move(c));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!p.lo.empty() && p.lo[j] > -kInf) {
      Constraint c;
      c.n.assign(n, 0.0);
      c.n[j] = 1.0;
      c.d = p.lo[j];
      cons.push_back(std::move(c));
    }
    if (!p.hi.empty() && p.hi[j] < kInf) {
      Constraint c;
      c.n.assign(n, 0.0);
      c.n[j] = -1.0;
      c.d = -p.hi[j];
      cons.push_back(std::move(c));
    }
  }
  const std::size_t m = cons.size();

  QPResult res;
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = -p.c[j] / p.q[j];

  std::vector<std::size_t> act;   // active constraint indices
  std::vector<double> duals;      // multipliers of the active set
  std::vector<double> smat, w, rdir, zdir(n);

  const std::size_t max_iter = 200 + 20 * m;
  std::size_t iter = 0;

  while (true) {
    if (++iter > max_iter) return {QPStatus::NumericalFailure, {}, 0.0, iter};

    // Most violated constraint; ties broken by index.
    std::size_t pick = m;
    double worst = -kQpTol;
    for (std::size_t i = 0; i < m; ++i) {
      double s = -cons[i].d;
      for (std::size_t j = 0; j < n; ++j) s += cons[i].n[j] * x[j];
      if (s < worst) { worst = s; pick = i; }
    }
    if (pick == m) break;  // KKT point

    double u_pick = 0.0;
    while (true) {
      if (++iter > max_iter) return {QPStatus::NumericalFailure, {}, 0.0, iter};
      const std::size_t k = act.size();
      const auto& np = cons[pick].n;

      // z = Q^-1 (np - N S^-1 N' Q^-1 np), r = S^-1 N' Q^-1 np
      if (k > 0) {
        smat.assign(k * k, 0.0);
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t b = 0; b <= a; ++b) {
            double sum = 0.0;
            const auto& na = cons[act[a]].n;
            const auto& nb = cons[act[b]].n;
            for (std::size_t j = 0; j < n; ++j) sum += na[j] * nb[j] / p.q[j];
            smat[a * k + b] = smat[b * k + a] = sum;
          }
        w.assign(k, 0.0);
        for (std::size_t a = 0; a < k; ++a) {
          double sum = 0.0;
          const auto& na = cons[act[a]].n;
          for (std::size_t j = 0; j < n; ++j) sum += na[j] * np[j] / p.q[j];
          w[a] = sum;
        }
        rdir = w;
        if (!cholesky_solve(smat, k, rdir))
          return {QPStatus::NumericalFailure, {}, 0.0, iter};
        for (std::size_t j = 0; j < n; ++j) {
          double nr = 0.0;
          for (std::size_t a = 0; a < k; ++a) nr += cons[act[a]].n[j] * rdir[a];
          zdir[j] = (np[j] - nr) / p.q[j];
        }
      } else {
        rdir.clear();
        for (std::size_t j = 0; j < n; ++j) zdir[j] = np[j] / p.q[j];
      }

      // Dual blocking step.
      double t1 = kInf;
      std::size_t blocker = k;
      for (std::size_t a = 0; a < k; ++a) {
        if (rdir[a] > kQpTol) {
          const double t = duals[a] / rdir[a];
          if (t < t1 - 1e-15 ||
              (t <= t1 + 1e-15 && (blocker == k || act[a] < act[blocker]))) {
            t1 = t;
            blocker = a;
          }
        }
      }
      // Full primal step to the violated constraint.
      double npz = 0.0;
      for (std::size_t j = 0; j < n; ++j) npz += np[j] * zdir[j];
      double svio = -cons[pick].d;
      for (std::size_t j = 0; j < n; ++j) svio += np[j] * x[j];
      const double t2 = (npz > kQpTol) ? -svio / npz : kInf;

      const double t = std::min(t1, t2);
      if (t == kInf) return {QPStatus::Infeasible, {}, 0.0, iter};

      for (std::size_t j = 0; j < n; ++j) x[j] += t * zdir[j];
      for (std::size_t a = 0; a < act.size(); ++a) duals[a] -= t * rdir[a];
      u_pick += t;

      if (t2 <= t1) {
        act.push_back(pick);
        duals.push_back(u_pick);
        break;
      }
      act.erase(act.begin() + static_cast<std::ptrdiff_t>(blocker));
      duals.erase(duals.begin() + static_cast<std::ptrdiff_t>(blocker));
    }
  }

  res.status = QPStatus::Optimal;
  res.x = x;
  res.iterations = iter;
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += 0.5 * p.q[j] * x[j] * x[j] + p.c[j] * x[j];
  res.objective = obj;
  return res;
}

}  // namespace quasifit
