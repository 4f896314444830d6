#include "quasifit/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "quasifit/feasibility.hpp"

namespace quasifit {

namespace {

inline std::size_t pid_i(std::uint32_t pid, std::size_t n) { return pid / n; }
inline std::size_t pid_j(std::uint32_t pid, std::size_t n) { return pid % n; }

struct Bits {
  std::vector<std::uint64_t> w;
  Bits() = default;
  explicit Bits(std::size_t n) : w((n + 63) / 64, 0) {}
  void set(std::size_t i) { w[i >> 6] |= 1ULL << (i & 63); }
  bool get(std::size_t i) const { return (w[i >> 6] >> (i & 63)) & 1ULL; }
  void merge(const Bits& o) {
    for (std::size_t k = 0; k < w.size(); ++k) w[k] |= o.w[k];
  }
};

// Transitive closure of the order constraints: ge[i] bit j set means
// z_j <= z_i is forced. Warshall over the small index range.
std::vector<Bits> order_closure(const std::vector<std::uint32_t>& f0, std::size_t n) {
  std::vector<Bits> ge(n, Bits(n));
  for (std::uint32_t pid : f0) ge[pid_i(pid, n)].set(pid_j(pid, n));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (ge[i].get(k)) ge[i].merge(ge[k]);
  return ge;
}

struct ColumnKey {
  std::uint32_t col = 0;
  std::vector<std::uint64_t> mask;
  bool operator==(const ColumnKey&) const = default;
};

struct ColumnKeyHash {
  std::size_t operator()(const ColumnKey& k) const {
    std::uint64_t h = 1469598103934665603ULL ^ k.col;
    for (std::uint64_t wrd : k.mask) {
      h ^= wrd;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct NodeData {
  std::vector<std::uint32_t> f0, f1;  // sorted pair ids
  std::vector<double> z;              // relaxation optimum
  double bound = 0.0;                 // SSE lower bound
  int depth = 0;
};

struct QNode {
  double bound = 0.0;
  std::uint64_t seq = 0;
  std::shared_ptr<const NodeData> data;
};

struct QNodeCmp {
  bool operator()(const QNode& a, const QNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

struct SolveContext {
  const MIQPModel* model = nullptr;
  HullFlavor flavor = HullFlavor::Upper;
  double sse_const = 0.0;

  std::mutex mu;
  std::condition_variable cv;
  std::priority_queue<QNode, std::vector<QNode>, QNodeCmp> queue;
  std::multiset<double> active_bounds;
  std::uint64_t seq = 0;
  std::size_t nodes = 0;
  bool stop = false;
  double final_lower = kInf;

  double best_obj = kInf;
  std::vector<double> best_z;

  std::unordered_map<ColumnKey, bool, ColumnKeyHash> column_memo;
  std::mutex memo_mu;
};

QPResult solve_order_qp(const SolveContext& ctx,
                        const std::vector<std::uint32_t>& f0) {
  const MIQPModel& m = *ctx.model;
  const std::size_t n = m.n();
  QPProblem qp;
  qp.q.resize(n);
  qp.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    qp.q[i] = 2.0 * m.w[i];
    qp.c[i] = -2.0 * m.w[i] * m.y[i];
  }
  qp.lo.assign(n, m.z_lo);
  qp.hi.assign(n, m.z_hi);
  qp.ineq_a.reserve(f0.size());
  for (std::uint32_t pid : f0) {
    std::vector<double> row(n, 0.0);
    row[pid_j(pid, n)] = 1.0;
    row[pid_i(pid, n)] = -1.0;
    qp.ineq_a.push_back(std::move(row));
    qp.ineq_b.push_back(0.0);
  }
  QPResult res = solve_qp(qp);
  if (res.status == QPStatus::NumericalFailure)
    throw std::runtime_error("solver: relaxation QP failed numerically");
  if (res.status == QPStatus::Optimal)
    res.objective = std::max(0.0, res.objective + ctx.sse_const);
  return res;
}

double sse_of(const SolveContext& ctx, const std::vector<double>& z) {
  const MIQPModel& m = *ctx.model;
  double s = 0.0;
  for (std::size_t i = 0; i < m.n(); ++i) {
    const double r = m.y[i] - z[i];
    s += m.w[i] * r * r;
  }
  return s;
}

bool column_feasible(SolveContext& ctx, std::size_t col,
                     const std::vector<std::size_t>& others) {
  if (others.empty()) return true;
  const MIQPModel& m = *ctx.model;
  ColumnKey key;
  key.col = static_cast<std::uint32_t>(col);
  key.mask.assign((m.n() + 63) / 64, 0);
  for (std::size_t i : others) key.mask[i >> 6] |= 1ULL << (i & 63);
  {
    std::lock_guard<std::mutex> lk(ctx.memo_mu);
    auto it = ctx.column_memo.find(key);
    if (it != ctx.column_memo.end()) return it->second;
  }
  const auto sep = separation_margin(m.x, col, others, ctx.flavor, m.xi_box);
  const bool ok = sep.margin >= m.eps;
  {
    std::lock_guard<std::mutex> lk(ctx.memo_mu);
    ctx.column_memo.emplace(std::move(key), ok);
  }
  return ok;
}

// Pair classification for a node: free pairs are neither separation-fixed
// nor order-implied (after closure).
struct NodeView {
  std::vector<Bits> ge;                  // order closure
  std::vector<Bits> f1;                  // f1[j] bit i: (i,j) fixed to 1
  std::vector<std::size_t> rank;         // tie-snapped levels of z
};

NodeView make_view(const NodeData& node, const std::vector<double>& z, std::size_t n) {
  NodeView v;
  v.ge = order_closure(node.f0, n);
  v.f1.assign(n, Bits(n));
  for (std::uint32_t pid : node.f1) v.f1[pid_j(pid, n)].set(pid_i(pid, n));
  v.rank = tie_ranks(z);
  return v;
}

// Constraint set of column j under the node's assignment completed by z:
// separation-fixed pairs plus free pairs whose values demand separation.
void column_sets(const NodeView& v, std::size_t n, std::size_t j,
                 std::vector<std::size_t>& all, std::vector<std::size_t>& induced) {
  all.clear();
  induced.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == j) continue;
    if (v.f1[j].get(i)) {
      all.push_back(i);
    } else if (v.rank[i] < v.rank[j] && !v.ge[i].get(j)) {
      all.push_back(i);
      induced.push_back(i);
    }
  }
}

struct Evaluation {
  bool feasible = true;
  std::size_t fail_col = 0;
  std::vector<std::size_t> fail_all, fail_induced;
};

Evaluation evaluate(SolveContext& ctx, const NodeView& v) {
  const std::size_t n = ctx.model->n();
  Evaluation ev;
  std::vector<std::size_t> all, induced;
  for (std::size_t j = 0; j < n; ++j) {
    column_sets(v, n, j, all, induced);
    if (!column_feasible(ctx, j, all)) {
      ev.feasible = false;
      ev.fail_col = j;
      ev.fail_all = all;
      ev.fail_induced = induced;
      return ev;
    }
  }
  return ev;
}

void offer_incumbent(SolveContext& ctx, double obj, const std::vector<double>& z) {
  std::lock_guard<std::mutex> lk(ctx.mu);
  if (obj < ctx.best_obj - 1e-15) {
    ctx.best_obj = obj;
    ctx.best_z = z;
  }
}

// Greedy rounding repair: keep demoting one separation-needing pair of the
// first infeasible column to the order side (guided by the hull certificate
// weights) and reproject until every column admits its xi vector.
void repair_heuristic(SolveContext& ctx, const NodeData& node) {
  const MIQPModel& m = *ctx.model;
  const std::size_t n = m.n();
  std::vector<std::uint32_t> f0 = node.f0;
  std::vector<double> z = node.z;
  const std::size_t max_rounds = n * (n - 1) + 1;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    NodeData probe;
    probe.f0 = f0;
    probe.f1 = node.f1;
    NodeView v = make_view(probe, z, n);
    Evaluation ev = evaluate(ctx, v);
    if (ev.feasible) {
      offer_incumbent(ctx, sse_of(ctx, z), z);
      return;
    }
    if (ev.fail_induced.empty()) return;  // nothing demotable; give up
    PointSet sub;
    sub.dim = m.x.dim;
    for (std::size_t i : ev.fail_all) sub.points.push_back(m.x.points[i]);
    std::size_t demote = ev.fail_induced.front();
    if (auto cert = hull_certificate(m.x.points[ev.fail_col], sub, ctx.flavor)) {
      double best_w = -1.0;
      for (std::size_t k = 0; k < ev.fail_all.size(); ++k) {
        const std::size_t i = ev.fail_all[k];
        const bool demotable =
            std::find(ev.fail_induced.begin(), ev.fail_induced.end(), i) !=
            ev.fail_induced.end();
        if (demotable && (*cert)[k] > best_w + 1e-12) {
          best_w = (*cert)[k];
          demote = i;
        }
      }
    }
    const std::uint32_t pid = m.pair_id(demote, ev.fail_col);
    f0.insert(std::upper_bound(f0.begin(), f0.end(), pid), pid);
    z = solve_order_qp(ctx, f0).x;
  }
}

void push_node(SolveContext& ctx, std::shared_ptr<const NodeData> data) {
  std::lock_guard<std::mutex> lk(ctx.mu);
  ctx.queue.push(QNode{data->bound, ctx.seq++, std::move(data)});
  ctx.cv.notify_one();
}

// Expands one node: integral-feasible nodes update the incumbent, others
// branch on the most fractional free binary (largest scaled order violation,
// ties lexicographic).
void process_node(SolveContext& ctx, const NodeData& node, std::size_t processed_count) {
  const MIQPModel& m = *ctx.model;
  const std::size_t n = m.n();
  NodeView v = make_view(node, node.z, n);
  Evaluation ev = evaluate(ctx, v);
  if (ev.feasible) {
    offer_incumbent(ctx, sse_of(ctx, node.z), node.z);
    return;
  }

  if (node.depth <= 1 || processed_count % 64 == 0) repair_heuristic(ctx, node);

  // Most fractional u: the minimal feasible completion of a free pair is
  // u_ij = (z_j - z_i)/M_z when positive, so fractionality ranks by the
  // scaled violation.
  std::size_t bi = n, bj = n;
  double best_score = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || v.f1[j].get(i) || v.ge[i].get(j)) continue;
      if (v.rank[i] >= v.rank[j]) continue;
      const double u = std::min(1.0, (node.z[j] - node.z[i]) / m.m_z);
      const double score = std::fabs(u - 0.5);
      if (score < best_score - 1e-15) {
        best_score = score;
        bi = i;
        bj = j;
      }
    }
  }
  if (bi == n) return;  // no fractional binary left; node exhausted
  const std::uint32_t pid = m.pair_id(bi, bj);

  double best_now;
  {
    std::lock_guard<std::mutex> lk(ctx.mu);
    best_now = ctx.best_obj;
  }

  // Child fixing u = 1: same relaxation, one more separation row. Pruned
  // immediately if that column's fixed rows alone are inconsistent.
  {
    std::vector<std::size_t> f1col;
    for (std::size_t i = 0; i < n; ++i)
      if (v.f1[bj].get(i)) f1col.push_back(i);
    f1col.insert(std::lower_bound(f1col.begin(), f1col.end(), bi), bi);
    if (column_feasible(ctx, bj, f1col)) {
      auto child = std::make_shared<NodeData>();
      child->f0 = node.f0;
      child->f1 = node.f1;
      child->f1.insert(std::upper_bound(child->f1.begin(), child->f1.end(), pid), pid);
      child->z = node.z;
      child->bound = node.bound;
      child->depth = node.depth + 1;
      push_node(ctx, std::move(child));
    }
  }

  // Child fixing u = 0: order row z_bj <= z_bi enters the projection.
  {
    auto child = std::make_shared<NodeData>();
    child->f0 = node.f0;
    child->f0.insert(std::upper_bound(child->f0.begin(), child->f0.end(), pid), pid);
    child->f1 = node.f1;
    child->depth = node.depth + 1;
    QPResult rel = solve_order_qp(ctx, child->f0);
    if (rel.status == QPStatus::Optimal) {
      child->bound = std::max(rel.objective, node.bound);
      child->z = std::move(rel.x);
      if (child->bound < best_now - m.gap_abs) push_node(ctx, std::move(child));
    }
  }
}

void worker(SolveContext& ctx) {
  std::unique_lock<std::mutex> lk(ctx.mu);
  while (true) {
    // Wake on work, on global stop, or when the whole tree drained.
    ctx.cv.wait(lk, [&] {
      return ctx.stop || !ctx.queue.empty() || ctx.active_bounds.empty();
    });
    if (ctx.stop) return;
    if (ctx.queue.empty()) {
      // Exhausted: the incumbent is proved optimal.
      ctx.stop = true;
      ctx.final_lower = ctx.best_obj;
      ctx.cv.notify_all();
      return;
    }
    const double global_lb =
        ctx.active_bounds.empty()
            ? ctx.queue.top().bound
            : std::min(ctx.queue.top().bound, *ctx.active_bounds.begin());
    if (global_lb >= ctx.best_obj - ctx.model->gap_abs ||
        ctx.nodes >= ctx.model->max_nodes) {
      ctx.stop = true;
      ctx.final_lower = global_lb;
      ctx.cv.notify_all();
      return;
    }
    QNode qn = ctx.queue.top();
    ctx.queue.pop();
    if (qn.bound >= ctx.best_obj - ctx.model->gap_abs) continue;
    const std::size_t processed = ++ctx.nodes;
    auto it = ctx.active_bounds.insert(qn.bound);
    lk.unlock();
    process_node(ctx, *qn.data, processed);
    lk.lock();
    ctx.active_bounds.erase(it);
    ctx.cv.notify_all();
  }
}

}  // namespace

MIQPModel build_model(const DataSet& data, const ShapeSpec& shape,
                      const SolverParams& params) {
  validate(data);
  if (shape.curvature != Curvature::Quasiconvex ||
      shape.monotonicity == Monotonicity::Increasing)
    throw std::invalid_argument(
        "build_model: expects canonical shape (quasiconvex + decreasing/none)");
  if (params.big_m_z < 0.0 || params.big_m_xi < 0.0 || params.eps_strict < 0.0)
    throw std::invalid_argument("build_model: nonpositive big-M or eps override");
  if (!(params.xi_box > 0.0))
    throw std::invalid_argument("build_model: xi box bound must be positive");
  {
    std::map<std::vector<double>, int> seen;
    for (const auto& row : data.x)
      if (++seen[row] > 1)
        throw std::invalid_argument("build_model: duplicate design points; aggregate first");
  }

  MIQPModel m;
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  m.monotone = shape.monotonicity == Monotonicity::Decreasing;
  m.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.w[i] = data.weight(i);

  // Coordinatewise increasing affine rescale of X onto [0,1]; preserves the
  // shape constraints and keeps the derived constants well conditioned.
  m.x_offset.assign(d, 0.0);
  m.x_scale.assign(d, 1.0);
  double max_range = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double lo = data.x[0][k], hi = data.x[0][k];
    for (const auto& row : data.x) {
      lo = std::min(lo, row[k]);
      hi = std::max(hi, row[k]);
    }
    m.x_offset[k] = lo;
    m.x_scale[k] = (hi > lo) ? 1.0 / (hi - lo) : 1.0;
    max_range = std::max(max_range, (hi > lo) ? 1.0 : 0.0);
  }
  std::vector<std::vector<double>> xs(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k)
      xs[i][k] = (data.x[i][k] - m.x_offset[k]) * m.x_scale[k];
  m.x = make_point_set(std::move(xs));

  double wsum = 0.0, ywsum = 0.0;
  double gamma_default = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    wsum += m.w[i];
    ywsum += m.w[i] * data.y[i];
    gamma_default = std::max(gamma_default, std::fabs(data.y[i]));
  }
  m.y_offset = ywsum / wsum;
  m.y.resize(n);
  double ylo = kInf, yhi = -kInf, var_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m.y[i] = data.y[i] - m.y_offset;
    ylo = std::min(ylo, m.y[i]);
    yhi = std::max(yhi, m.y[i]);
    var_sum += m.w[i] * m.y[i] * m.y[i];
  }

  m.gamma = params.gamma >= 0.0 ? params.gamma : gamma_default;
  m.z_lo = -m.gamma - m.y_offset;
  m.z_hi = m.gamma - m.y_offset;
  m.m_z = params.big_m_z > 0.0 ? params.big_m_z : 2.0 * (yhi - ylo) + 1.0;
  m.m_xi = params.big_m_xi > 0.0 ? params.big_m_xi
                                 : 2.0 * static_cast<double>(d) * max_range + 1.0;
  m.xi_box = params.xi_box;

  double max_pair_dist = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        dist = std::max(dist, std::fabs(m.x.points[i][k] - m.x.points[j][k]));
      max_pair_dist = std::max(max_pair_dist, dist);
    }
  m.eps = params.eps_strict > 0.0
              ? params.eps_strict
              : 1e-6 * (max_pair_dist > 0.0 ? max_pair_dist : 1.0);

  m.gap_abs = params.gap_abs > 0.0 ? params.gap_abs : std::max(1e-9, 1e-7 * var_sum);
  m.max_nodes = params.max_nodes;
  m.threads = std::max(1u, params.threads);
  return m;
}

QPResult qp_relaxation(const BBNode& node, const MIQPModel& model) {
  SolveContext ctx;
  ctx.model = &model;
  ctx.flavor = model.monotone ? HullFlavor::Upper : HullFlavor::Plain;
  ctx.sse_const = 0.0;
  for (std::size_t i = 0; i < model.n(); ++i)
    ctx.sse_const += model.w[i] * model.y[i] * model.y[i];
  return solve_order_qp(ctx, node.fixed0);
}

ThetaSolution solve(const MIQPModel& model) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = model.n();

  SolveContext ctx;
  ctx.model = &model;
  ctx.flavor = model.monotone ? HullFlavor::Upper : HullFlavor::Plain;
  ctx.sse_const = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    ctx.sse_const += model.w[i] * model.y[i] * model.y[i];

  auto root = std::make_shared<NodeData>();
  QPResult rel = solve_order_qp(ctx, root->f0);
  root->bound = rel.objective;
  root->z = std::move(rel.x);
  push_node(ctx, std::move(root));

  const unsigned nthreads = std::min<unsigned>(
      model.threads, static_cast<unsigned>(std::thread::hardware_concurrency() > 0
                                               ? std::thread::hardware_concurrency()
                                               : 1));
  if (nthreads <= 1) {
    worker(ctx);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back([&ctx] { worker(ctx); });
    for (auto& th : pool) th.join();
  }

  if (ctx.best_z.empty()) {
    // Constant vectors are always feasible; never reached in practice.
    const double c = std::clamp(0.0, model.z_lo, model.z_hi);
    ctx.best_z.assign(n, c);
    ctx.best_obj = sse_of(ctx, ctx.best_z);
  }

  // Pooled values can drift apart in the last bits; collapse each tie group
  // onto its weighted mean so equal levels are equal doubles downstream.
  {
    const auto rank = tie_ranks(ctx.best_z);
    const std::size_t groups = *std::max_element(rank.begin(), rank.end()) + 1;
    std::vector<double> wsum(groups, 0.0), zsum(groups, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      wsum[rank[i]] += model.w[i];
      zsum[rank[i]] += model.w[i] * ctx.best_z[i];
    }
    for (std::size_t i = 0; i < n; ++i) ctx.best_z[i] = zsum[rank[i]] / wsum[rank[i]];
    ctx.best_obj = sse_of(ctx, ctx.best_z);
  }

  ThetaSolution sol;
  sol.nodes = ctx.nodes;
  sol.m_z = model.m_z;
  sol.m_xi = model.m_xi;
  sol.eps = model.eps;
  sol.gamma = model.gamma;
  sol.objective = ctx.best_obj;
  sol.gap = std::isfinite(ctx.final_lower)
                ? std::max(0.0, ctx.best_obj - ctx.final_lower)
                : 0.0;
  sol.status = sol.gap <= model.gap_abs + 1e-15 ? SolveStatus::Optimal
                                                : SolveStatus::NodeLimit;

  sol.theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.theta[i] = ctx.best_z[i] + model.y_offset;

  const auto rank = tie_ranks(ctx.best_z);
  sol.u.assign(n, std::vector<char>(n, 0));
  sol.xi.assign(n, std::vector<double>(model.d(), 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> below;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      if (rank[i] < rank[j]) {
        sol.u[i][j] = 1;
        below.push_back(i);
      }
    }
    if (!below.empty())
      sol.xi[j] = separation_margin(model.x, j, below, ctx.flavor, model.xi_box).xi;
  }

  sol.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return sol;
}

}  // namespace quasifit
