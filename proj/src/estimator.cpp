#include "quasifit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "quasifit/feasibility.hpp"
#include "quasifit/geometry.hpp"
#include "quasifit/qp.hpp"

namespace quasifit {

namespace {

// Ascending order of the canonical (sign-adjusted) fitted values, ties broken
// by original index. Any grouping of tied values yields the same predictor;
// the fixed rule only pins determinism.
std::vector<std::size_t> canonical_order(const std::vector<double>& theta, bool flip_y) {
  std::vector<std::size_t> perm(theta.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    const double va = flip_y ? -theta[a] : theta[a];
    const double vb = flip_y ? -theta[b] : theta[b];
    return va < vb;
  });
  return perm;
}

double raw_sse(const FittedModel& model, const DataSet& data) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = data.y[i] - model.theta[i];
    s += data.weight(i) * r * r;
  }
  return s;
}

}  // namespace

FittedModel fit(const DataSet& data, const ShapeSpec& shape, const SolverParams& params) {
  validate(data);
  const CanonicalMap canon = canonical_map(shape);
  const DataSet flipped = apply_flips(data, canon);
  const AggregatedData agg = aggregate_duplicates(flipped);

  const ShapeSpec canonical_shape{Curvature::Quasiconvex, canon.canonical_monotonicity};
  MIQPModel miqp = build_model(agg.data, canonical_shape, params);
  ThetaSolution sol = solve(miqp);

  FittedModel model;
  model.kind = PredictorKind::QuasiconvexLse;
  model.shape = shape;
  model.points = data.x;
  model.theta.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double canon_value = sol.theta[agg.group_of[i]];
    model.theta[i] = canon.flip_y ? -canon_value : canon_value;
  }
  model.sort_perm = canonical_order(model.theta, canon.flip_y);
  model.x_offset = miqp.x_offset;
  model.x_scale = miqp.x_scale;
  model.y_offset = miqp.y_offset;
  model.stats.objective = raw_sse(model, data);
  model.stats.gap = sol.gap;
  model.stats.nodes = sol.nodes;
  model.stats.wall_ms = sol.wall_ms;
  model.stats.m_z = sol.m_z;
  model.stats.m_xi = sol.m_xi;
  model.stats.eps = sol.eps;
  model.stats.gamma = sol.gamma;
  model.stats.status = sol.status;
  return model;
}

FittedModel fit_isotonic(const DataSet& data, Monotonicity monotonicity) {
  validate(data);
  if (monotonicity == Monotonicity::None)
    throw std::invalid_argument("fit_isotonic: monotone direction required");
  const std::size_t n = data.size();
  const std::size_t d = data.dim();

  QPProblem qp;
  qp.q.resize(n);
  qp.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    qp.q[i] = 2.0 * data.weight(i);
    qp.c[i] = -2.0 * data.weight(i) * data.y[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool leq = true;  // X_i <= X_j componentwise
      for (std::size_t k = 0; k < d; ++k)
        if (data.x[i][k] > data.x[j][k]) { leq = false; break; }
      if (!leq) continue;
      // decreasing: theta_j <= theta_i; increasing: theta_i <= theta_j
      std::vector<double> row(n, 0.0);
      if (monotonicity == Monotonicity::Decreasing) {
        row[j] = 1.0;
        row[i] = -1.0;
      } else {
        row[i] = 1.0;
        row[j] = -1.0;
      }
      qp.ineq_a.push_back(std::move(row));
      qp.ineq_b.push_back(0.0);
    }
  }
  QPResult res = solve_qp(qp);
  if (res.status != QPStatus::Optimal)
    throw std::runtime_error("fit_isotonic: projection QP failed");

  FittedModel model;
  model.kind = PredictorKind::MonotoneEnvelope;
  model.shape = {Curvature::Quasiconvex, monotonicity};  // curvature unused here
  model.points = data.x;
  model.theta = res.x;
  model.sort_perm = canonical_order(model.theta, false);
  model.x_offset.assign(d, 0.0);
  model.x_scale.assign(d, 1.0);
  model.stats.objective = raw_sse(model, data);
  return model;
}

namespace {

double predict_envelope(const FittedModel& model, const std::vector<double>& x) {
  const bool decreasing = model.shape.monotonicity == Monotonicity::Decreasing;
  bool found = false;
  double value = 0.0;
  double fallback = model.theta.front();
  for (std::size_t i = 0; i < model.size(); ++i) {
    fallback = decreasing ? std::max(fallback, model.theta[i])
                          : std::min(fallback, model.theta[i]);
    bool leq = true;  // X_i <= x
    for (std::size_t k = 0; k < x.size(); ++k)
      if (model.points[i][k] > x[k]) { leq = false; break; }
    if (!leq) continue;
    if (!found) {
      value = model.theta[i];
      found = true;
    } else {
      value = decreasing ? std::min(value, model.theta[i])
                         : std::max(value, model.theta[i]);
    }
  }
  return found ? value : fallback;
}

double predict_hull(const FittedModel& model, const std::vector<double>& x) {
  const CanonicalMap canon = canonical_map(model.shape);
  const HullFlavor flavor = canon.canonical_monotonicity == Monotonicity::Decreasing
                                ? HullFlavor::Upper
                                : HullFlavor::Plain;
  const std::size_t n = model.size();
  std::vector<double> query = x;
  if (canon.flip_x)
    for (double& v : query) v = -v;

  std::vector<std::vector<double>> canon_sorted(n);
  for (std::size_t m = 0; m < n; ++m) {
    canon_sorted[m] = model.points[model.sort_perm[m]];
    if (canon.flip_x)
      for (double& v : canon_sorted[m]) v = -v;
  }

  auto member = [&](std::size_t m) {
    PointSet prefix;
    prefix.dim = x.size();
    prefix.points.assign(canon_sorted.begin(),
                         canon_sorted.begin() + static_cast<std::ptrdiff_t>(m));
    return in_hull_flavor(query, prefix, flavor);
  };

  // Prefix hulls are nested, so membership is monotone in m.
  if (!member(n)) return model.theta[model.sort_perm[n - 1]];
  std::size_t lo = 1, hi = n;  // member(hi) true
  if (member(1)) return model.theta[model.sort_perm[0]];
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (member(mid)) hi = mid;
    else lo = mid;
  }
  return model.theta[model.sort_perm[hi - 1]];
}

}  // namespace

double predict(const FittedModel& model, const std::vector<double>& x) {
  if (x.size() != model.dim())
    throw std::invalid_argument("predict: dimension mismatch");
  if (model.kind == PredictorKind::MonotoneEnvelope) return predict_envelope(model, x);
  return predict_hull(model, x);
}

double in_sample_loss(const FittedModel& model, const DataSet& data) {
  validate(data);
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = predict(model, data.x[i]) - data.y[i];
    s += data.weight(i) * r * r;
  }
  return s;
}

double risk_vs_truth(const FittedModel& model,
                     const std::function<double(const std::vector<double>&)>& truth,
                     const std::vector<std::vector<double>>& eval_points) {
  if (eval_points.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : eval_points) {
    const double r = predict(model, p) - truth(p);
    s += r * r;
  }
  return s / static_cast<double>(eval_points.size());
}

std::string model_to_json(const FittedModel& model) {
  nlohmann::json j;
  j["version"] = "quasifit-model-v1";
  j["kind"] = model.kind == PredictorKind::QuasiconvexLse ? "quasiconvex-lse"
                                                          : "monotone-envelope";
  j["shape"] = {{"curvature", to_string(model.shape.curvature)},
                {"monotonicity", to_string(model.shape.monotonicity)}};
  j["points"] = model.points;
  j["fitted"] = model.theta;
  j["sort_permutation"] = model.sort_perm;
  j["rescale"] = {{"x_offset", model.x_offset},
                  {"x_scale", model.x_scale},
                  {"y_offset", model.y_offset}};
  j["stats"] = {{"objective", model.stats.objective},
                {"gap", model.stats.gap},
                {"nodes", model.stats.nodes},
                {"wall_ms", model.stats.wall_ms},
                {"m_z", model.stats.m_z},
                {"m_xi", model.stats.m_xi},
                {"eps", model.stats.eps},
                {"gamma", model.stats.gamma},
                {"status", model.stats.status == SolveStatus::Optimal ? "optimal"
                                                                      : "node_limit"}};
  return j.dump(2);
}

FittedModel model_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("version").get<std::string>() != "quasifit-model-v1")
    throw std::runtime_error("unsupported model version");
  FittedModel model;
  model.kind = j.at("kind").get<std::string>() == "quasiconvex-lse"
                   ? PredictorKind::QuasiconvexLse
                   : PredictorKind::MonotoneEnvelope;
  model.shape.curvature = curvature_from_string(j.at("shape").at("curvature"));
  model.shape.monotonicity = monotonicity_from_string(j.at("shape").at("monotonicity"));
  model.points = j.at("points").get<std::vector<std::vector<double>>>();
  model.theta = j.at("fitted").get<std::vector<double>>();
  model.sort_perm = j.at("sort_permutation").get<std::vector<std::size_t>>();
  model.x_offset = j.at("rescale").at("x_offset").get<std::vector<double>>();
  model.x_scale = j.at("rescale").at("x_scale").get<std::vector<double>>();
  model.y_offset = j.at("rescale").at("y_offset").get<double>();
  const auto& s = j.at("stats");
  model.stats.objective = s.at("objective").get<double>();
  model.stats.gap = s.at("gap").get<double>();
  model.stats.nodes = s.at("nodes").get<std::size_t>();
  model.stats.wall_ms = s.at("wall_ms").get<double>();
  model.stats.m_z = s.at("m_z").get<double>();
  model.stats.m_xi = s.at("m_xi").get<double>();
  model.stats.eps = s.at("eps").get<double>();
  model.stats.gamma = s.at("gamma").get<double>();
  model.stats.status = s.at("status").get<std::string>() == "optimal"
                           ? SolveStatus::Optimal
                           : SolveStatus::NodeLimit;
  return model;
}

void save_model(const FittedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << model_to_json(model) << '\n';
}

FittedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace quasifit
