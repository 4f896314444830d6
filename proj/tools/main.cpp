#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quasifit/csv.hpp"
#include "quasifit/estimator.hpp"
#include "quasifit/feasibility.hpp"
#include "quasifit/oracle.hpp"
#include "quasifit/synth.hpp"

namespace {

using namespace quasifit;

struct ShapeFlags {
  std::string curvature = "quasiconvex";
  std::string monotone = "decreasing";

  ShapeSpec spec() const {
    return {curvature_from_string(curvature), monotonicity_from_string(monotone)};
  }
};

void add_shape_flags(CLI::App* cmd, ShapeFlags& flags) {
  cmd->add_option("--curvature", flags.curvature, "quasiconvex or quasiconcave")
      ->check(CLI::IsMember({"quasiconvex", "quasiconcave"}));
  cmd->add_option("--monotone", flags.monotone, "decreasing, increasing, or none")
      ->check(CLI::IsMember({"decreasing", "increasing", "none"}));
}

struct SolverFlags {
  double big_m = 0.0;
  double eps = 0.0;
  double gamma = -1.0;
  double gap = 0.0;
  std::size_t max_nodes = 200000;
  unsigned threads = 0;  // 0 = number of cores

  SolverParams params() const {
    SolverParams p;
    p.big_m_z = big_m;
    p.big_m_xi = big_m;
    p.eps_strict = eps;
    p.gamma = gamma;
    p.gap_abs = gap;
    p.max_nodes = max_nodes;
    p.threads = threads > 0 ? threads : std::thread::hardware_concurrency();
    if (p.threads == 0) p.threads = 1;
    return p;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--big-m", flags.big_m, "override both big-M constants (0 = auto)");
  cmd->add_option("--eps", flags.eps, "strict-inequality slack (0 = auto)");
  cmd->add_option("--gamma", flags.gamma, "bound on fitted magnitudes (-1 = max |y|)");
  cmd->add_option("--gap", flags.gap, "absolute optimality gap (0 = auto)");
  cmd->add_option("--max-nodes", flags.max_nodes, "branch-and-bound node limit");
  cmd->add_option("--threads", flags.threads, "worker threads (0 = cores)");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text << '\n';
}

nlohmann::json report_json(const FittedModel& model) {
  return {{"objective", model.stats.objective},
          {"gap", model.stats.gap},
          {"nodes", model.stats.nodes},
          {"wall_ms", model.stats.wall_ms},
          {"m_z", model.stats.m_z},
          {"m_xi", model.stats.m_xi},
          {"eps", model.stats.eps},
          {"gamma", model.stats.gamma}};
}

int cmd_fit(const std::string& input, const std::string& model_path,
            const std::string& report_path, const ShapeFlags& shape,
            const SolverFlags& solver) {
  const DataSet data = dataset_from_table(read_csv(input));
  const FittedModel model = fit(data, shape.spec(), solver.params());
  save_model(model, model_path);
  emit(report_json(model).dump(2), report_path);
  return model.stats.status == SolveStatus::NodeLimit ? 3 : 0;
}

int cmd_predict(const std::string& model_path, const std::string& points_path,
                const std::string& output) {
  const FittedModel model = load_model(model_path);
  const auto points = points_from_table(read_csv(points_path));
  std::vector<std::string> header;
  for (std::size_t k = 1; k <= model.dim(); ++k) header.push_back("x" + std::to_string(k));
  header.emplace_back("prediction");
  std::vector<std::vector<double>> rows;
  rows.reserve(points.size());
  for (const auto& p : points) {
    std::vector<double> row = p;
    row.push_back(predict(model, p));
    rows.push_back(std::move(row));
  }
  if (output.empty()) {
    std::ostringstream ss;
    ss.precision(17);
    for (std::size_t i = 0; i < header.size(); ++i)
      ss << header[i] << (i + 1 == header.size() ? '\n' : ',');
    for (const auto& row : rows)
      for (std::size_t i = 0; i < row.size(); ++i)
        ss << row[i] << (i + 1 == row.size() ? '\n' : ',');
    std::cout << ss.str();
  } else {
    write_csv(output, header, rows);
  }
  return 0;
}

int cmd_check(const std::string& input, const std::string& output,
              const ShapeFlags& shape) {
  const DataSet data = dataset_from_table(read_csv(input));
  const PointSet x = make_point_set(data.x);
  const FeasibilityReport report = check(data.y, x, shape.spec());
  nlohmann::json j;
  j["feasible"] = report.feasible;
  if (!report.feasible) {
    j["witness"] = *report.witness_index + 1;  // 1-based for reporting
    std::vector<std::size_t> set1;
    for (std::size_t v : report.witness_set) set1.push_back(v + 1);
    j["witness_set"] = set1;
  }
  emit(j.dump(2), output);
  return 0;
}

int cmd_simulate(const SynthConfig& cfg, const std::string& output) {
  const SynthData synth = generate(cfg);
  std::vector<std::string> header;
  for (std::size_t k = 1; k <= cfg.d; ++k) header.push_back("x" + std::to_string(k));
  header.emplace_back("y");
  header.emplace_back("truth");
  std::vector<std::vector<double>> rows;
  rows.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    std::vector<double> row = synth.data.x[i];
    row.push_back(synth.data.y[i]);
    row.push_back(synth.truth[i]);
    rows.push_back(std::move(row));
  }
  write_csv(output, header, rows);
  return 0;
}

int cmd_bench(const SynthConfig& base, std::size_t reps, const std::string& output,
              const ShapeFlags& shape, const SolverFlags& solver) {
  std::vector<std::vector<double>> rows;
  const ShapeSpec spec = shape.spec();
  const Monotonicity iso_dir = spec.monotonicity == Monotonicity::None
                                   ? Monotonicity::Increasing
                                   : spec.monotonicity;
  for (std::size_t r = 0; r < reps; ++r) {
    SynthConfig cfg = base;
    cfg.seed = base.seed + r;
    const SynthData synth = generate(cfg);
    const FittedModel lse = fit(synth.data, spec, solver.params());
    const FittedModel iso = fit_isotonic(synth.data, iso_dir);
    double lse_loss = 0.0, iso_loss = 0.0;
    for (std::size_t i = 0; i < synth.data.size(); ++i) {
      const double dl = lse.theta[i] - synth.truth[i];
      const double di = iso.theta[i] - synth.truth[i];
      lse_loss += dl * dl;
      iso_loss += di * di;
    }
    rows.push_back({static_cast<double>(r), lse_loss, iso_loss,
                    lse.stats.objective, iso.stats.objective});
  }
  write_csv(output, {"rep", "lse_loss", "iso_loss", "lse_sse", "iso_sse"}, rows);
  return 0;
}

int cmd_oracle(const std::string& input, const std::string& output,
               const ShapeFlags& shape, std::size_t max_n) {
  const DataSet data = dataset_from_table(read_csv(input));
  const OracleResult result = brute_force(data, shape.spec(), max_n);
  nlohmann::json j;
  j["objective"] = result.objective;
  j["optima"] = result.optima;
  emit(j.dump(2), output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasiconvex (and monotone) least-squares regression"};
  app.require_subcommand(1);

  ShapeFlags fit_shape, check_shape, oracle_shape;
  SolverFlags fit_solver, bench_solver;
  std::string input, model_path, report_path, points_path, output;
  SynthConfig synth_cfg;
  std::size_t reps = 20, oracle_max_n = 5;
  bool misspecified = false;

  auto* fit_cmd = app.add_subcommand("fit", "fit the shape-constrained LSE");
  fit_cmd->add_option("--input", input, "training CSV with columns x1..xd,y")->required();
  fit_cmd->add_option("--output", model_path, "model JSON path")->required();
  fit_cmd->add_option("--report", report_path, "report JSON path (default stdout)");
  add_shape_flags(fit_cmd, fit_shape);
  add_solver_flags(fit_cmd, fit_solver);

  auto* predict_cmd = app.add_subcommand("predict", "evaluate a fitted model");
  predict_cmd->add_option("--model", model_path, "model JSON path")->required();
  predict_cmd->add_option("--points", points_path, "CSV with columns x1..xd")->required();
  predict_cmd->add_option("--output", output, "prediction CSV path (default stdout)");

  auto* check_cmd = app.add_subcommand("check", "certify feasibility of values");
  check_cmd->add_option("--input", input, "CSV with columns x1..xd,y")->required();
  check_cmd->add_option("--output", output, "verdict JSON path (default stdout)");
  add_shape_flags(check_cmd, check_shape);

  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic dataset");
  sim_cmd->add_option("--n", synth_cfg.n, "sample size");
  sim_cmd->add_option("--d", synth_cfg.d, "dimension");
  sim_cmd->add_option("--xi", synth_cfg.xi, "smoothness in [0,1]");
  sim_cmd->add_option("--sigma2", synth_cfg.sigma2, "noise variance");
  sim_cmd->add_option("--seed", synth_cfg.seed, "random seed");
  sim_cmd->add_flag("--misspecified", misspecified, "use the bumped truth");
  sim_cmd->add_option("--output", output, "dataset CSV path")->required();

  auto* bench_cmd = app.add_subcommand("bench", "LSE vs isotonic over replications");
  bench_cmd->add_option("--n", synth_cfg.n, "sample size");
  bench_cmd->add_option("--d", synth_cfg.d, "dimension");
  bench_cmd->add_option("--xi", synth_cfg.xi, "smoothness in [0,1]");
  bench_cmd->add_option("--sigma2", synth_cfg.sigma2, "noise variance");
  bench_cmd->add_option("--seed", synth_cfg.seed, "base seed (rep r uses seed+r)");
  bench_cmd->add_flag("--misspecified", misspecified, "use the bumped truth");
  bench_cmd->add_option("--reps", reps, "number of replications");
  bench_cmd->add_option("--output", output, "loss CSV path")->required();
  ShapeFlags bench_shape;
  bench_shape.curvature = "quasiconvex";
  bench_shape.monotone = "increasing";
  add_shape_flags(bench_cmd, bench_shape);
  add_solver_flags(bench_cmd, bench_solver);

  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force reference solve");
  oracle_cmd->add_option("--input", input, "CSV with columns x1..xd,y")->required();
  oracle_cmd->add_option("--output", output, "result JSON path (default stdout)");
  oracle_cmd->add_option("--max-n", oracle_max_n, "enumeration cap (hard limit 6)");
  add_shape_flags(oracle_cmd, oracle_shape);

  CLI11_PARSE(app, argc, argv);

  try {
    synth_cfg.misspecified = misspecified;
    if (fit_cmd->parsed()) return cmd_fit(input, model_path, report_path, fit_shape, fit_solver);
    if (predict_cmd->parsed()) return cmd_predict(model_path, points_path, output);
    if (check_cmd->parsed()) return cmd_check(input, output, check_shape);
    if (sim_cmd->parsed()) return cmd_simulate(synth_cfg, output);
    if (bench_cmd->parsed()) return cmd_bench(synth_cfg, reps, output, bench_shape, bench_solver);
    if (oracle_cmd->parsed()) return cmd_oracle(input, output, oracle_shape, oracle_max_n);
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
