#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "quasifit/dataset.hpp"
#include "quasifit/geometry.hpp"
#include "quasifit/qp.hpp"
#include "quasifit/shape.hpp"

namespace quasifit {

struct SolverParams {
  // Zeros mean "derive from the data"; see build_model for the formulas.
  double big_m_z = 0.0;
  double big_m_xi = 0.0;
  double eps_strict = 0.0;
  double xi_box = 1.0;
  double gamma = -1.0;       // negative => max_i |Y_i|
  double gap_abs = 0.0;      // absolute branch-and-bound gap
  std::size_t max_nodes = 200000;
  unsigned threads = 1;
};

// Instantiated big-M program over canonical data: responses centered, each
// design coordinate affinely mapped to [0,1]. Binary u_ij relaxes
// z_j - z_i <= M_z u_ij against the separation row
// xi_j.(X_i - X_j) >= M_xi (u_ij - 1) + eps, with xi_j in [0,B]^d for the
// decreasing shape and [-B,B]^d for the quasiconvex-only one.
struct MIQPModel {
  PointSet x;                // rescaled design points
  std::vector<double> y;     // centered responses
  std::vector<double> w;     // observation weights
  bool monotone = true;      // canonical decreasing; false = quasiconvex-only
  double m_z = 0.0, m_xi = 0.0, eps = 0.0, xi_box = 1.0;
  double z_lo = 0.0, z_hi = 0.0;  // Gamma box in centered units
  double gamma = 0.0;             // Gamma in original units
  double y_offset = 0.0;
  std::vector<double> x_offset, x_scale;  // internal = (orig - offset) * scale
  double gap_abs = 0.0;
  std::size_t max_nodes = 0;
  unsigned threads = 1;

  std::size_t n() const { return y.size(); }
  std::size_t d() const { return x.dim; }
  std::size_t num_binaries() const { return n() * (n() - 1); }
  std::size_t num_continuous() const { return n() + n() * d(); }

  // Ordered pair (i,j), i != j, owning binary u_ij.
  std::uint32_t pair_id(std::size_t i, std::size_t j) const {
    return static_cast<std::uint32_t>(i * n() + j);
  }
};

// Branch-and-bound node: a partial assignment of the binaries.
struct BBNode {
  std::vector<std::uint32_t> fixed0;  // order side: z_j <= z_i
  std::vector<std::uint32_t> fixed1;  // separation side: xi_j.(X_i - X_j) >= eps
  double bound = 0.0;                 // objective lower bound (SSE units)
  int depth = 0;
};

enum class SolveStatus { Optimal, NodeLimit };

struct ThetaSolution {
  std::vector<double> theta;              // fitted values, original units
  std::vector<std::vector<double>> xi;    // separation vectors per index
  std::vector<std::vector<char>> u;       // minimal indicators, u[i][j] = 1{theta_i < theta_j}
  double objective = 0.0;                 // weighted SSE
  double gap = 0.0;
  std::size_t nodes = 0;
  double wall_ms = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  double m_z = 0.0, m_xi = 0.0, eps = 0.0, gamma = 0.0;
};

// Expects canonical shape -- (quasiconvex, decreasing) or (quasiconvex,
// none) -- and distinct design points. Throws std::invalid_argument
// otherwise or on nonpositive user overrides.
MIQPModel build_model(const DataSet& data, const ShapeSpec& shape,
                      const SolverParams& params = {});

// Continuous relaxation of a node: the least-squares projection under the
// order constraints implied by its fixed-0 pairs and the Gamma box. The u
// and xi blocks carry no objective weight, so projecting them out leaves the
// bound unchanged; the reported objective is in SSE units.
QPResult qp_relaxation(const BBNode& node, const MIQPModel& model);

// Best-first branch and bound over the binaries. The returned theta is
// feasible for the model's shape; status NodeLimit reports the incumbent
// with its remaining gap.
ThetaSolution solve(const MIQPModel& model);

}  // namespace quasifit
