#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace quasifit {

// Finite point set in R^d.
struct PointSet {
  std::size_t dim = 0;
  std::vector<std::vector<double>> points;

  std::size_t size() const { return points.size(); }
};

PointSet make_point_set(std::vector<std::vector<double>> points);

enum class HullFlavor { Upper, Lower, Plain };

// Membership of p in the upper orthant of the convex hull of S: is there a
// convex combination of S lying componentwise at or below p? Boundary points
// count as members; the empty set has no members.
bool in_upper_hull(const std::vector<double>& p, const PointSet& s);

// Mirror image: convex combination componentwise at or above p.
bool in_lower_hull(const std::vector<double>& p, const PointSet& s);

// Plain convex hull membership (no orthant slack).
bool in_hull(const std::vector<double>& p, const PointSet& s);

bool in_hull_flavor(const std::vector<double>& p, const PointSet& s, HullFlavor flavor);

// Membership plus the certifying hull weights when the point is a member.
std::optional<std::vector<double>> hull_certificate(const std::vector<double>& p,
                                                    const PointSet& s,
                                                    HullFlavor flavor);

}  // namespace quasifit
