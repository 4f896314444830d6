#include "quasifit/feasibility.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "quasifit/lp.hpp"

namespace quasifit {

HullFlavor flavor_for(Monotonicity m) {
  switch (m) {
    case Monotonicity::Decreasing: return HullFlavor::Upper;
    case Monotonicity::Increasing: return HullFlavor::Lower;
    default: return HullFlavor::Plain;
  }
}

std::vector<std::size_t> tie_ranks(const std::vector<double>& z) {
  const std::size_t n = z.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
  std::vector<std::size_t> rank(n, 0);
  std::size_t level = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && z[order[k]] - z[order[k - 1]] > kTieTol) ++level;
    rank[order[k]] = level;
  }
  return rank;
}

namespace {

struct CanonicalCheck {
  std::vector<double> z;
  HullFlavor flavor;
};

// Quasiconcave candidates reduce to quasiconvex ones by negating the values,
// which also mirrors the monotone direction.
CanonicalCheck canonicalize(const std::vector<double>& z, const ShapeSpec& shape) {
  CanonicalCheck c;
  c.z = z;
  Monotonicity mono = shape.monotonicity;
  if (shape.curvature == Curvature::Quasiconcave) {
    for (double& v : c.z) v = -v;
    if (mono == Monotonicity::Decreasing) mono = Monotonicity::Increasing;
    else if (mono == Monotonicity::Increasing) mono = Monotonicity::Decreasing;
  }
  c.flavor = flavor_for(mono);
  return c;
}

std::vector<std::size_t> level_set(const std::vector<std::size_t>& rank, std::size_t i) {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < rank.size(); ++j)
    if (rank[j] < rank[i]) s.push_back(j);
  return s;
}

PointSet subset(const PointSet& x, const std::vector<std::size_t>& idx) {
  PointSet s;
  s.dim = x.dim;
  s.points.reserve(idx.size());
  for (std::size_t j : idx) s.points.push_back(x.points[j]);
  return s;
}

}  // namespace

FeasibilityReport check(const std::vector<double>& z, const PointSet& x,
                        const ShapeSpec& shape) {
  if (z.size() != x.size())
    throw std::invalid_argument("feasibility: value/point count mismatch");
  const auto canon = canonicalize(z, shape);
  const auto rank = tie_ranks(canon.z);
  FeasibilityReport report;
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto s = level_set(rank, i);
    if (s.empty()) continue;
    if (in_hull_flavor(x.points[i], subset(x, s), canon.flavor)) {
      report.feasible = false;
      report.witness_index = i;
      report.witness_set = std::move(s);
      return report;
    }
  }
  return report;
}

std::vector<std::pair<std::size_t, std::vector<std::size_t>>> violating_constraints(
    const std::vector<double>& z, const PointSet& x, const ShapeSpec& shape) {
  if (z.size() != x.size())
    throw std::invalid_argument("feasibility: value/point count mismatch");
  const auto canon = canonicalize(z, shape);
  const auto rank = tie_ranks(canon.z);
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto s = level_set(rank, i);
    if (s.empty()) continue;
    if (in_hull_flavor(x.points[i], subset(x, s), canon.flavor))
      out.emplace_back(i, std::move(s));
  }
  return out;
}

SeparationResult separation_margin(const PointSet& x, std::size_t j,
                                   const std::vector<std::size_t>& others,
                                   HullFlavor flavor, double box) {
  const std::size_t d = x.dim;
  if (others.empty()) return {kInf, std::vector<double>(d, 0.0)};

  // Variables (xi, t); minimize -t subject to t - xi.(X_i - X_j) <= 0.
  LPProblem lp;
  const std::size_t nv = d + 1;
  lp.c.assign(nv, 0.0);
  lp.c[d] = -1.0;
  lp.lo.assign(nv, 0.0);
  lp.hi.assign(nv, box);
  lp.lo[d] = -kInf;
  lp.hi[d] = kInf;
  if (flavor == HullFlavor::Lower) {
    for (std::size_t k = 0; k < d; ++k) { lp.lo[k] = -box; lp.hi[k] = 0.0; }
  } else if (flavor == HullFlavor::Plain) {
    for (std::size_t k = 0; k < d; ++k) lp.lo[k] = -box;
  }
  for (std::size_t i : others) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t k = 0; k < d; ++k) row[k] = -(x.points[i][k] - x.points[j][k]);
    row[d] = 1.0;
    lp.ineq_a.push_back(std::move(row));
    lp.ineq_b.push_back(0.0);
  }

  LPResult res = solve_lp(lp);
  if (res.status != LPStatus::Optimal)
    throw std::runtime_error("feasibility: separation LP failed");
  SeparationResult out;
  out.margin = -res.objective;
  out.xi.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(d));
  return out;
}

}  // namespace quasifit
