#pragma once

#include <cstddef>
#include <vector>

#include "quasifit/lp.hpp"

namespace quasifit {

// KKT tolerance of the active-set kernel.
inline constexpr double kQpTol = 1e-8;

enum class QPStatus { Optimal, Infeasible, NumericalFailure };

// minimize 1/2 x' diag(q) x + c.x  subject to  A x <= b,  lo <= x <= hi.
// The quadratic term is strictly positive on the diagonal; that is the only
// form the least-squares objectives in this project produce.
struct QPProblem {
  std::vector<double> q;  // diagonal of the quadratic term, all > 0
  std::vector<double> c;
  std::vector<std::vector<double>> ineq_a;
  std::vector<double> ineq_b;
  std::vector<double> lo, hi;  // empty means unbounded on that side

  std::size_t num_vars() const { return q.size(); }
};

struct QPResult {
  QPStatus status = QPStatus::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

// Dual active-set method (Goldfarb-Idnani): starts from the unconstrained
// minimum and adds violated constraints one at a time, keeping dual
// feasibility. Exact on vertices/faces, deterministic tie-breaking.
QPResult solve_qp(const QPProblem& p);

}  // namespace quasifit
