#include "quasifit/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "quasifit/feasibility.hpp"
#include "quasifit/geometry.hpp"
#include "quasifit/qp.hpp"

namespace quasifit {

namespace {

struct ColumnSets {
  std::vector<std::uint32_t> maximal;  // bitmasks over the other indices
};

std::vector<std::size_t> mask_to_indices(std::uint32_t mask, std::size_t n,
                                         std::size_t skip) {
  std::vector<std::size_t> idx;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == skip) continue;
    if (mask & (1u << pos)) idx.push_back(i);
    ++pos;
  }
  return idx;
}

}  // namespace

OracleResult brute_force(const DataSet& data, const ShapeSpec& shape, std::size_t max_n) {
  validate(data);
  const CanonicalMap canon = canonical_map(shape);
  const DataSet flipped = apply_flips(data, canon);
  const AggregatedData agg = aggregate_duplicates(flipped);
  const std::size_t n = agg.data.size();
  if (n > max_n || n > 6)
    throw std::length_error("oracle: instance larger than the enumeration cap");

  PointSet x = make_point_set(agg.data.x);
  const HullFlavor flavor = canon.canonical_monotonicity == Monotonicity::Decreasing
                                ? HullFlavor::Upper
                                : HullFlavor::Plain;

  // Separable subsets per column; only the maximal ones can host optima,
  // since shrinking a set merely adds order constraints to the projection.
  std::vector<ColumnSets> cols(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint32_t full = n >= 2 ? (1u << (n - 1)) - 1 : 0;
    std::vector<char> feasible(full + 1, 0);
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      const auto others = mask_to_indices(mask, n, j);
      feasible[mask] =
          others.empty() ||
          separation_margin(x, j, others, flavor, 1.0).margin >= kOracleDelta;
    }
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (!feasible[mask]) continue;
      bool maximal = true;
      for (std::size_t b = 0; b < n - 1 && maximal; ++b)
        if (!(mask & (1u << b)) && feasible[mask | (1u << b)]) maximal = false;
      if (maximal) cols[j].maximal.push_back(mask);
    }
    if (cols[j].maximal.empty()) cols[j].maximal.push_back(0);
  }

  QPProblem qp;
  qp.q.resize(n);
  qp.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    qp.q[i] = 2.0 * agg.data.weight(i);
    qp.c[i] = -2.0 * agg.data.weight(i) * agg.data.y[i];
  }
  double sse_const = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sse_const += agg.data.weight(i) * agg.data.y[i] * agg.data.y[i];

  OracleResult best;
  best.objective = kInf;
  std::vector<std::vector<double>> best_canon;

  std::vector<std::size_t> choice(n, 0);
  while (true) {
    qp.ineq_a.clear();
    qp.ineq_b.clear();
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint32_t mask = cols[j].maximal[choice[j]];
      std::size_t pos = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        if (!(mask & (1u << pos))) {
          std::vector<double> row(n, 0.0);
          row[j] = 1.0;
          row[i] = -1.0;
          qp.ineq_a.push_back(std::move(row));
          qp.ineq_b.push_back(0.0);
        }
        ++pos;
      }
    }
    QPResult res = solve_qp(qp);
    if (res.status != QPStatus::Optimal)
      throw std::runtime_error("oracle: projection QP failed");
    const double obj = std::max(0.0, res.objective + sse_const);
    if (obj < best.objective - 1e-9) {
      best.objective = obj;
      best_canon.clear();
      best_canon.push_back(res.x);
    } else if (obj <= best.objective + 1e-9) {
      bool duplicate = false;
      for (const auto& z : best_canon) {
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          diff = std::max(diff, std::fabs(z[i] - res.x[i]));
        if (diff <= 1e-8) { duplicate = true; break; }
      }
      if (!duplicate) best_canon.push_back(res.x);
    }

    std::size_t j = 0;
    while (j < n && ++choice[j] == cols[j].maximal.size()) choice[j++] = 0;
    if (j == n) break;
  }

  // Expand to the original rows and orientation; u records the separations
  // the optimum actually needs.
  for (const auto& zc : best_canon) {
    std::vector<double> theta(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double v = zc[agg.group_of[i]];
      theta[i] = canon.flip_y ? -v : v;
    }
    const auto rank = tie_ranks(zc);
    std::vector<std::vector<char>> u(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && rank[i] < rank[j]) u[i][j] = 1;
    best.optima.push_back(std::move(theta));
    best.assignments.push_back(std::move(u));
  }

  // Report the raw SSE over the original rows (aggregation keeps the
  // minimizer; the within-group scatter is a constant offset).
  double raw = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = data.y[i] - best.optima.front()[i];
    raw += data.weight(i) * r * r;
  }
  best.objective = raw;
  return best;
}

}  // namespace quasifit
