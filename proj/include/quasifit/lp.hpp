#pragma once

#include <limits>
#include <vector>

namespace quasifit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Pivot/feasibility tolerance of the simplex kernel.
inline constexpr double kLpTol = 1e-9;
// Phase-1 objective above this value classifies the program as infeasible.
inline constexpr double kLpPhase1Tol = 1e-7;

enum class LPStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

// minimize c.x  subject to  A x <= b,  E x = f,  lo <= x <= hi.
// Bounds may be +-infinity; an all-zero objective turns the solve into a
// pure feasibility check.
struct LPProblem {
  std::vector<double> c;
  std::vector<std::vector<double>> ineq_a;
  std::vector<double> ineq_b;
  std::vector<std::vector<double>> eq_a;
  std::vector<double> eq_b;
  std::vector<double> lo, hi;  // empty means unbounded on that side

  std::size_t num_vars() const { return c.size(); }
};

struct LPResult {
  LPStatus status = LPStatus::NumericalFailure;
  std::vector<double> x;  // populated when Optimal
  double objective = 0.0;
};

// Two-phase dense simplex with Bland's anti-cycling rule. Deterministic:
// identical inputs give identical outputs on one platform.
LPResult solve_lp(const LPProblem& p);

}  // namespace quasifit
