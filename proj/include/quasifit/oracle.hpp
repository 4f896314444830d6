#pragma once

#include <cstddef>
#include <vector>

#include "quasifit/dataset.hpp"
#include "quasifit/shape.hpp"

namespace quasifit {

struct OracleResult {
  double objective = 0.0;  // weighted in-sample SSE at the optimum
  std::vector<std::vector<double>> optima;          // distinct optimal fits
  std::vector<std::vector<std::vector<char>>> assignments;  // minimal u per optimum
};

// Exhaustive reference solver for tiny instances. Enumerates, per index j,
// the maximal sets of points that a single xi_j can separate from X_j
// (margin >= delta), then minimizes the projection QP over every choice of
// maximal sets; smaller sets only add order constraints and can never win,
// which is exactly the pruning of contradictory assignments. Throws
// std::length_error beyond max_n (hard limit 6).
OracleResult brute_force(const DataSet& data, const ShapeSpec& shape,
                         std::size_t max_n = 5);

// Margin used to approximate the strict separation inequalities.
inline constexpr double kOracleDelta = 1e-9;

}  // namespace quasifit
