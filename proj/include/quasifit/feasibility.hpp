#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "quasifit/geometry.hpp"
#include "quasifit/shape.hpp"

namespace quasifit {

// Values closer than this are treated as tied when forming level sets.
inline constexpr double kTieTol = 1e-12;

struct FeasibilityReport {
  bool feasible = true;
  std::optional<std::size_t> witness_index;  // first violating index
  std::vector<std::size_t> witness_set;      // its level set {j : z_j < z_i}
};

// Decides whether z is realizable by a function of the given shape at the
// design points: for each i, the level set S = {j : z_j < z_i} must not
// capture X_i in its hull (upper orthant for decreasing shapes, lower for
// increasing, plain hull when no monotonicity is imposed). Runs n
// hull-membership programs.
FeasibilityReport check(const std::vector<double>& z, const PointSet& x,
                        const ShapeSpec& shape);

// All violated (i, S) pairs among the n canonical level sets.
std::vector<std::pair<std::size_t, std::vector<std::size_t>>> violating_constraints(
    const std::vector<double>& z, const PointSet& x, const ShapeSpec& shape);

// Tie groups of z after transitive snapping at kTieTol: rank[i] orders the
// distinct levels, equal ranks mean tied values.
std::vector<std::size_t> tie_ranks(const std::vector<double>& z);

struct SeparationResult {
  double margin = 0.0;           // best achievable t, +inf for an empty set
  std::vector<double> xi;        // maximizing direction
};

// Largest t such that some xi in the flavor's box satisfies
// xi.(X_i - X_j) >= t for every i in `others`. The box is [0,B]^d for Upper,
// [-B,0]^d for Lower, [-B,B]^d for Plain; positive margin certifies that X_j
// stays outside the corresponding hull of the others.
SeparationResult separation_margin(const PointSet& x, std::size_t j,
                                   const std::vector<std::size_t>& others,
                                   HullFlavor flavor, double box);

HullFlavor flavor_for(Monotonicity m);

}  // namespace quasifit
