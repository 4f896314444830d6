#include "quasifit/geometry.hpp"

#include <stdexcept>

#include "quasifit/lp.hpp"

namespace quasifit {

PointSet make_point_set(std::vector<std::vector<double>> points) {
  PointSet s;
  if (points.empty()) return s;
  s.dim = points.front().size();
  if (s.dim == 0) throw std::invalid_argument("geometry: zero-dimensional points");
  for (const auto& p : points)
    if (p.size() != s.dim) throw std::invalid_argument("geometry: mixed dimensions");
  s.points = std::move(points);
  return s;
}

namespace {

// Feasibility program behind all three membership tests: lambda >= 0,
// sum lambda = 1, sum lambda_i S_i + v = p, with v in the orthant picked by
// the flavor (v = 0 for plain hulls).
std::optional<std::vector<double>> solve_membership(const std::vector<double>& p,
                                                    const PointSet& s,
                                                    HullFlavor flavor) {
  if (s.size() == 0) return std::nullopt;
  if (p.size() != s.dim)
    throw std::invalid_argument("geometry: query dimension mismatch");
  const std::size_t m = s.size();
  const std::size_t d = s.dim;
  const bool with_slack = flavor != HullFlavor::Plain;
  const std::size_t nvars = m + (with_slack ? d : 0);

  LPProblem lp;
  lp.c.assign(nvars, 0.0);
  lp.lo.assign(nvars, 0.0);
  lp.hi.assign(nvars, kInf);
  lp.eq_a.assign(d + 1, std::vector<double>(nvars, 0.0));
  lp.eq_b.assign(d + 1, 0.0);
  // Lower-orthant flavor mirrors the upper one: v enters with opposite sign.
  const double vsign = flavor == HullFlavor::Lower ? -1.0 : 1.0;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t i = 0; i < m; ++i) lp.eq_a[r][i] = s.points[i][r];
    if (with_slack) lp.eq_a[r][m + r] = vsign;
    lp.eq_b[r] = p[r];
  }
  for (std::size_t i = 0; i < m; ++i) lp.eq_a[d][i] = 1.0;
  lp.eq_b[d] = 1.0;

  LPResult res = solve_lp(lp);
  if (res.status == LPStatus::Infeasible) return std::nullopt;
  if (res.status != LPStatus::Optimal)
    throw std::runtime_error("geometry: membership LP failed numerically");
  return std::vector<double>(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(m));
}

}  // namespace

bool in_upper_hull(const std::vector<double>& p, const PointSet& s) {
  return solve_membership(p, s, HullFlavor::Upper).has_value();
}

bool in_lower_hull(const std::vector<double>& p, const PointSet& s) {
  return solve_membership(p, s, HullFlavor::Lower).has_value();
}

bool in_hull(const std::vector<double>& p, const PointSet& s) {
  return solve_membership(p, s, HullFlavor::Plain).has_value();
}

bool in_hull_flavor(const std::vector<double>& p, const PointSet& s, HullFlavor flavor) {
  return solve_membership(p, s, flavor).has_value();
}

std::optional<std::vector<double>> hull_certificate(const std::vector<double>& p,
                                                    const PointSet& s,
                                                    HullFlavor flavor) {
  return solve_membership(p, s, flavor);
}

}  // namespace quasifit
