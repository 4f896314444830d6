#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "quasifit/dataset.hpp"
#include "quasifit/shape.hpp"
#include "quasifit/solver.hpp"

namespace quasifit {

enum class PredictorKind { QuasiconvexLse, MonotoneEnvelope };

struct SolveStats {
  double objective = 0.0;  // in-sample SSE over the original rows
  double gap = 0.0;
  std::size_t nodes = 0;
  double wall_ms = 0.0;
  double m_z = 0.0, m_xi = 0.0, eps = 0.0, gamma = 0.0;
  SolveStatus status = SolveStatus::Optimal;
};

// Fitted estimator. Prediction is piecewise constant: walk the fitted values
// in increasing order and return the first level whose prefix hull (with the
// shape's orthant) captures the query point, falling back to the largest
// level outside the hull of all design points. Isotonic fits use the
// monotone envelope extension instead.
struct FittedModel {
  PredictorKind kind = PredictorKind::QuasiconvexLse;
  ShapeSpec shape;
  std::vector<std::vector<double>> points;  // original design points
  std::vector<double> theta;                // fitted values, original orientation
  std::vector<std::size_t> sort_perm;       // canonical ascending order, ties by index
  std::vector<double> x_offset, x_scale;    // solver rescale maps
  double y_offset = 0.0;
  SolveStats stats;

  std::size_t size() const { return theta.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

// Full pipeline: canonicalize the shape by sign flips, aggregate duplicate
// design points, solve the mixed-integer program, map everything back.
FittedModel fit(const DataSet& data, const ShapeSpec& shape,
                const SolverParams& params = {});

// Least-squares projection onto the monotone cone z_i >= z_j whenever
// X_i <= X_j (decreasing; reversed for increasing). A single convex QP.
FittedModel fit_isotonic(const DataSet& data, Monotonicity monotonicity);

double predict(const FittedModel& model, const std::vector<double>& x);

double in_sample_loss(const FittedModel& model, const DataSet& data);

// Mean squared difference between predictions and a reference function over
// the evaluation points.
double risk_vs_truth(const FittedModel& model,
                     const std::function<double(const std::vector<double>&)>& truth,
                     const std::vector<std::vector<double>>& eval_points);

// quasifit-model-v1 JSON document.
std::string model_to_json(const FittedModel& model);
FittedModel model_from_json(const std::string& text);
void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(const std::string& path);

}  // namespace quasifit
