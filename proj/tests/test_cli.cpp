#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "quasifit/csv.hpp"
#include "quasifit/estimator.hpp"

using namespace quasifit;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(QUASIFIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kExample2Csv = "x1,x2,y\n1,0,0\n0.75,0.75,1\n0,1,0\n";

}  // namespace

TEST_CASE("fit writes a model and a report with objective 0.5") {
  write_file("t_fit.csv", kExample2Csv);
  const int rc = run(
      "fit --input t_fit.csv --output t_model.json --report t_report.json "
      "--curvature quasiconvex --monotone decreasing --threads 1");
  CHECK(rc == 0);
  const auto report = nlohmann::json::parse(slurp("t_report.json"));
  CHECK(std::abs(report.at("objective").get<double>() - 0.5) < 1e-6);
  CHECK(report.contains("gap"));
  CHECK(report.contains("nodes"));
  CHECK(report.contains("wall_ms"));
  CHECK(report.contains("m_z"));
  CHECK(report.contains("m_xi"));
  CHECK(report.contains("eps"));
  CHECK(report.contains("gamma"));
  const auto model = nlohmann::json::parse(slurp("t_model.json"));
  CHECK(model.at("version").get<std::string>() == "quasifit-model-v1");
}

TEST_CASE("fit-save-load-predict reproduces training values bit-exactly") {
  write_file("t_round.csv", kExample2Csv);
  REQUIRE(run("fit --input t_round.csv --output t_round_model.json --threads 1") == 0);
  write_file("t_round_pts.csv", "x1,x2\n1,0\n0.75,0.75\n0,1\n");
  REQUIRE(run("predict --model t_round_model.json --points t_round_pts.csv "
              "--output t_round_pred.csv") == 0);
  const FittedModel model = load_model("t_round_model.json");
  const CsvTable pred = read_csv("t_round_pred.csv");
  const std::size_t col = pred.column("prediction");
  REQUIRE(pred.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(pred.rows[i][col] == model.theta[i]);
}

TEST_CASE("predict applies the orthant and out-of-hull rules") {
  write_file("t_pred.csv", kExample2Csv);
  REQUIRE(run("fit --input t_pred.csv --output t_pred_model.json --threads 1") == 0);
  write_file("t_pred_pts.csv", "x1,x2\n2,2\n0,0\n");
  REQUIRE(run("predict --model t_pred_model.json --points t_pred_pts.csv "
              "--output t_pred_out.csv") == 0);
  const CsvTable pred = read_csv("t_pred_out.csv");
  const std::size_t col = pred.column("prediction");
  // (2,2) dominates the smallest fitted level; (0,0) escapes every hull.
  CHECK(pred.rows[0][col] == doctest::Approx(0.0));
  CHECK(pred.rows[1][col] == doctest::Approx(0.5));
}

TEST_CASE("check reports the worked witness as index 2") {
  write_file("t_check.csv", kExample2Csv);
  REQUIRE(run("check --input t_check.csv --output t_check.json") == 0);
  const auto verdict = nlohmann::json::parse(slurp("t_check.json"));
  CHECK_FALSE(verdict.at("feasible").get<bool>());
  CHECK(verdict.at("witness").get<int>() == 2);
}

TEST_CASE("check certifies the values of a fitted model") {
  write_file("t_selfcheck.csv", kExample2Csv);
  REQUIRE(run("fit --input t_selfcheck.csv --output t_selfcheck_model.json "
              "--threads 1") == 0);
  const FittedModel model = load_model("t_selfcheck_model.json");
  std::ostringstream csv;
  csv.precision(17);
  csv << "x1,x2,y\n";
  for (std::size_t i = 0; i < model.size(); ++i)
    csv << model.points[i][0] << ',' << model.points[i][1] << ',' << model.theta[i]
        << '\n';
  write_file("t_selfcheck_z.csv", csv.str());
  REQUIRE(run("check --input t_selfcheck_z.csv --output t_selfcheck.json") == 0);
  CHECK(nlohmann::json::parse(slurp("t_selfcheck.json")).at("feasible").get<bool>());
}

TEST_CASE("check accepts constant values") {
  write_file("t_const.csv", "x1,x2,y\n1,0,3\n0.75,0.75,3\n0,1,3\n");
  REQUIRE(run("check --input t_const.csv --output t_const.json") == 0);
  CHECK(nlohmann::json::parse(slurp("t_const.json")).at("feasible").get<bool>());
}

TEST_CASE("empty and malformed CSVs exit with code 2") {
  write_file("t_empty.csv", "");
  CHECK(run("fit --input t_empty.csv --output t_x.json") == 2);
  write_file("t_headeronly.csv", "x1,x2,y\n");
  CHECK(run("fit --input t_headeronly.csv --output t_x.json") == 2);
  write_file("t_bad.csv", "x1,x2,y\n1,oops,3\n");
  CHECK(run("fit --input t_bad.csv --output t_x.json") == 2);
  CHECK(run("fit --input t_missing_file.csv --output t_x.json") == 2);
}

TEST_CASE("gamma zero clamps all fits to zero") {
  write_file("t_gamma.csv", kExample2Csv);
  REQUIRE(run("fit --input t_gamma.csv --output t_gamma_model.json --report "
              "t_gamma_report.json --gamma 0 --threads 1") == 0);
  const auto report = nlohmann::json::parse(slurp("t_gamma_report.json"));
  CHECK(std::abs(report.at("objective").get<double>() - 1.0) < 1e-9);  // sum Y^2
  const FittedModel model = load_model("t_gamma_model.json");
  for (double v : model.theta) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("simulate is reproducible under a fixed seed") {
  REQUIRE(run("simulate --n 50 --d 2 --xi 1 --sigma2 0.1 --seed 7 --output t_sim_a.csv") == 0);
  REQUIRE(run("simulate --n 50 --d 2 --xi 1 --sigma2 0.1 --seed 7 --output t_sim_b.csv") == 0);
  CHECK(slurp("t_sim_a.csv") == slurp("t_sim_b.csv"));
  const CsvTable table = read_csv("t_sim_a.csv");
  CHECK(table.rows.size() == 50);
  CHECK(table.header == std::vector<std::string>{"x1", "x2", "y", "truth"});
}

TEST_CASE("simulated data feeds fit directly") {
  REQUIRE(run("simulate --n 10 --d 2 --xi 1 --sigma2 0 --seed 3 --output t_sim_fit.csv") == 0);
  CHECK(run("fit --input t_sim_fit.csv --output t_sim_model.json --monotone increasing "
            "--threads 1") == 0);
}

TEST_CASE("noiseless bench recovers the truth and nests the SSE columns") {
  REQUIRE(run("bench --n 8 --d 2 --xi 1 --sigma2 0 --reps 3 --seed 11 "
              "--output t_bench.csv --threads 1") == 0);
  const CsvTable table = read_csv("t_bench.csv");
  REQUIRE(table.rows.size() == 3);
  const std::size_t lse = table.column("lse_loss");
  const std::size_t lse_sse = table.column("lse_sse");
  const std::size_t iso_sse = table.column("iso_sse");
  for (const auto& row : table.rows) {
    CHECK(row[lse] <= 1e-10);
    CHECK(row[lse_sse] >= row[iso_sse] - 1e-9);
  }
}

TEST_CASE("noisy bench keeps the in-sample SSE ordering") {
  REQUIRE(run("bench --n 10 --d 2 --xi 0.67 --sigma2 0.2 --reps 3 --seed 13 "
              "--output t_bench2.csv --threads 1") == 0);
  const CsvTable table = read_csv("t_bench2.csv");
  const std::size_t lse_sse = table.column("lse_sse");
  const std::size_t iso_sse = table.column("iso_sse");
  for (const auto& row : table.rows) CHECK(row[lse_sse] >= row[iso_sse] - 1e-9);
}

TEST_CASE("oracle subcommand reproduces the worked objective") {
  write_file("t_oracle.csv", kExample2Csv);
  REQUIRE(run("oracle --input t_oracle.csv --output t_oracle.json") == 0);
  const auto result = nlohmann::json::parse(slurp("t_oracle.json"));
  CHECK(std::abs(result.at("objective").get<double>() - 0.5) < 1e-9);
  CHECK(result.at("optima").size() == 2);
}

TEST_CASE("node limit exits 3 but still writes the incumbent") {
  write_file("t_limit.csv", kExample2Csv);
  CHECK(run("fit --input t_limit.csv --output t_limit_model.json --max-nodes 1 "
            "--threads 1") == 3);
  const FittedModel model = load_model("t_limit_model.json");
  CHECK(model.size() == 3);
  CHECK(model.stats.gap > 0.0);
}

TEST_CASE("predict with mismatched dimensions exits 2") {
  write_file("t_dim.csv", kExample2Csv);
  REQUIRE(run("fit --input t_dim.csv --output t_dim_model.json --threads 1") == 0);
  write_file("t_dim_pts.csv", "x1\n1\n");
  CHECK(run("predict --model t_dim_model.json --points t_dim_pts.csv "
            "--output t_dim_out.csv") == 2);
}
