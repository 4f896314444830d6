#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "quasifit/estimator.hpp"
#include "quasifit/feasibility.hpp"
#include "quasifit/synth.hpp"

using namespace quasifit;

namespace {

const ShapeSpec kQcvxDec{Curvature::Quasiconvex, Monotonicity::Decreasing};
const ShapeSpec kQcvxInc{Curvature::Quasiconvex, Monotonicity::Increasing};
const ShapeSpec kQcaveInc{Curvature::Quasiconcave, Monotonicity::Increasing};
const ShapeSpec kQcaveDec{Curvature::Quasiconcave, Monotonicity::Decreasing};
const ShapeSpec kQcvxOnly{Curvature::Quasiconvex, Monotonicity::None};

DataSet example2_data() {
  DataSet d;
  d.x = {{1.0, 0.0}, {0.75, 0.75}, {0.0, 1.0}};
  d.y = {0.0, 1.0, 0.0};
  return d;
}

// The worked projection (0.5, 0.5, 0) as a ready-made model.
FittedModel example2_model() {
  FittedModel m;
  m.kind = PredictorKind::QuasiconvexLse;
  m.shape = kQcvxDec;
  m.points = {{1.0, 0.0}, {0.75, 0.75}, {0.0, 1.0}};
  m.theta = {0.5, 0.5, 0.0};
  m.sort_perm = {2, 0, 1};
  m.x_offset = {0.0, 0.0};
  m.x_scale = {1.0, 1.0};
  return m;
}

DataSet gaussian_data(SplitMix64& rng, std::size_t n, std::size_t d) {
  DataSet data;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p(d);
    for (auto& v : p) v = rng.next_normal();
    data.x.push_back(std::move(p));
    data.y.push_back(rng.next_normal());
  }
  return data;
}

}  // namespace

TEST_CASE("example 2 fit reaches SSE 0.5 at a listed optimum") {
  const FittedModel m = fit(example2_data(), kQcvxDec);
  CHECK(m.stats.objective == doctest::Approx(0.5).epsilon(1e-9));
  const bool a = std::fabs(m.theta[0] - 0.5) < 1e-4 && std::fabs(m.theta[1] - 0.5) < 1e-4 &&
                 std::fabs(m.theta[2]) < 1e-4;
  const bool b = std::fabs(m.theta[0]) < 1e-4 && std::fabs(m.theta[1] - 0.5) < 1e-4 &&
                 std::fabs(m.theta[2] - 0.5) < 1e-4;
  CHECK((a || b));
}

TEST_CASE("noiseless quasiconvex-increasing data is interpolated") {
  SynthConfig cfg;
  cfg.n = 12;
  cfg.d = 2;
  cfg.xi = 1.0;
  cfg.sigma2 = 0.0;
  cfg.seed = 5;
  const SynthData s = generate(cfg);
  const FittedModel m = fit(s.data, kQcvxInc);
  for (std::size_t i = 0; i < cfg.n; ++i)
    CHECK(std::fabs(m.theta[i] - s.data.y[i]) <= 1e-9);
  CHECK(m.stats.objective <= 1e-12);
}

TEST_CASE("sign-flip duality is exact for all four monotone variants") {
  SplitMix64 rng(41);
  const DataSet d = gaussian_data(rng, 7, 2);
  DataSet neg_y = d;
  for (auto& v : neg_y.y) v = -v;
  DataSet neg_x = d;
  for (auto& row : neg_x.x)
    for (auto& v : row) v = -v;

  SUBCASE("quasiconcave-increasing = negated quasiconvex-decreasing on -Y") {
    const FittedModel flip = fit(neg_y, kQcvxDec);
    const FittedModel direct = fit(d, kQcaveInc);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(direct.theta[i] == -flip.theta[i]);
  }
  SUBCASE("quasiconvex-increasing = quasiconvex-decreasing on -X") {
    const FittedModel flip = fit(neg_x, kQcvxDec);
    const FittedModel direct = fit(d, kQcvxInc);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(direct.theta[i] == flip.theta[i]);
  }
  SUBCASE("quasiconcave-decreasing = negated quasiconvex-decreasing on (-X,-Y)") {
    DataSet neg_both = neg_x;
    for (auto& v : neg_both.y) v = -v;
    const FittedModel flip = fit(neg_both, kQcvxDec);
    const FittedModel direct = fit(d, kQcaveDec);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(direct.theta[i] == -flip.theta[i]);
  }
}

TEST_CASE("predictions on the worked model") {
  const FittedModel m = example2_model();
  CHECK(predict(m, {0.0, 1.0}) == 0.0);   // training point
  CHECK(predict(m, {2.0, 2.0}) == 0.0);   // inside the first upper orthant
  CHECK(predict(m, {0.0, 0.0}) == 0.5);   // outside every prefix hull
  CHECK(predict(m, {1.0, 0.0}) == 0.5);
  CHECK(predict(m, {0.75, 0.75}) == 0.5);
}

TEST_CASE("training points reproduce fitted values exactly") {
  SplitMix64 rng(42);
  for (const ShapeSpec& shape : {kQcvxDec, kQcvxInc, kQcvxOnly, kQcaveInc}) {
    const DataSet d = gaussian_data(rng, 8, 2);
    const FittedModel m = fit(d, shape);
    for (std::size_t i = 0; i < d.size(); ++i)
      CHECK(predict(m, d.x[i]) == m.theta[i]);
  }
}

TEST_CASE("fitted values satisfy their own shape certificate") {
  SplitMix64 rng(43);
  for (const ShapeSpec& shape : {kQcvxDec, kQcaveDec, kQcvxOnly}) {
    const DataSet d = gaussian_data(rng, 9, 3);
    const FittedModel m = fit(d, shape);
    CHECK(check(m.theta, make_point_set(d.x), shape).feasible);
  }
}

TEST_CASE("isotonic two-chain pools and antichain stays put") {
  DataSet chain;
  chain.x = {{0.0, 0.0}, {1.0, 1.0}};
  chain.y = {0.0, 1.0};
  const FittedModel pooled = fit_isotonic(chain, Monotonicity::Decreasing);
  CHECK(pooled.theta[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(pooled.theta[1] == doctest::Approx(0.5).epsilon(1e-10));

  DataSet anti;
  anti.x = {{0.0, 1.0}, {1.0, 0.0}};
  anti.y = {-1.0, 7.0};
  const FittedModel same = fit_isotonic(anti, Monotonicity::Decreasing);
  CHECK(same.theta[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(same.theta[1] == doctest::Approx(7.0).epsilon(1e-12));

  const FittedModel already = fit_isotonic(chain, Monotonicity::Increasing);
  CHECK(already.theta[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(already.theta[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("isotonic prediction extends by the monotone envelope") {
  DataSet d;
  d.x = {{0.0, 0.0}, {1.0, 1.0}};
  d.y = {2.0, 1.0};
  const FittedModel m = fit_isotonic(d, Monotonicity::Decreasing);
  CHECK(predict(m, {0.0, 0.0}) == doctest::Approx(2.0));
  CHECK(predict(m, {2.0, 2.0}) == doctest::Approx(1.0));
  CHECK(predict(m, {-1.0, -1.0}) == doctest::Approx(2.0));  // below all points
  CHECK(predict(m, {0.5, 0.0}) == doctest::Approx(2.0));    // dominates only X1
}

TEST_CASE("cone nesting of in-sample losses") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 5; ++trial) {
    const DataSet d = gaussian_data(rng, 8, 2);
    const double sse_lse = fit(d, kQcvxDec).stats.objective;
    const double sse_iso = fit_isotonic(d, Monotonicity::Decreasing).stats.objective;
    const double sse_qonly = fit(d, kQcvxOnly).stats.objective;
    CHECK(sse_lse >= sse_iso - 1e-9);
    CHECK(sse_lse >= sse_qonly - 1e-9);
    CHECK(sse_iso >= -1e-15);
  }
}

TEST_CASE("duplicate design points share one fitted value") {
  DataSet d;
  d.x = {{0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}};
  d.y = {0.0, 2.0, 3.0};
  const FittedModel m = fit(d, kQcvxDec);
  CHECK(m.theta[0] == m.theta[1]);
  // aggregated problem: mean 1 at the lower point, 3 above; decreasing
  // forces pooling toward (weight 2) 1 and (weight 1) 3 -> both 5/3
  CHECK(m.theta[0] == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
  CHECK(m.theta[2] == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("integer weights behave like row duplication") {
  SplitMix64 rng(47);
  DataSet weighted;
  DataSet expanded;
  for (int i = 0; i < 5; ++i) {
    const std::vector<double> p{rng.next_normal(), rng.next_normal()};
    const double y = rng.next_normal();
    const auto w = static_cast<std::size_t>(1 + rng.next_u64() % 3);
    weighted.x.push_back(p);
    weighted.y.push_back(y);
    weighted.w.push_back(static_cast<double>(w));
    for (std::size_t rep = 0; rep < w; ++rep) {
      expanded.x.push_back(p);
      expanded.y.push_back(y);
    }
  }
  const FittedModel a = fit(weighted, kQcvxDec);
  const FittedModel b = fit(expanded, kQcvxDec);
  std::size_t row = 0;
  for (std::size_t i = 0; i < weighted.size(); ++i) {
    for (std::size_t rep = 0; rep < static_cast<std::size_t>(weighted.w[i]); ++rep, ++row)
      CHECK(a.theta[i] == doctest::Approx(b.theta[row]).epsilon(1e-9));
  }
}

TEST_CASE("in-sample loss and risk helpers") {
  const FittedModel m = example2_model();
  const DataSet d = example2_data();
  CHECK(in_sample_loss(m, d) == doctest::Approx(0.5).epsilon(1e-12));
  const auto zero_truth = [](const std::vector<double>&) { return 0.0; };
  const double risk = risk_vs_truth(m, zero_truth, d.x);
  CHECK(risk == doctest::Approx((0.25 + 0.25 + 0.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("a zero-clamped fit loses exactly the response energy") {
  // centered responses, gamma = 0: everything clamps to zero and the loss
  // is sum of squares = n * Var(Y)
  DataSet d;
  d.x = {{0.0, 1.0}, {1.0, 0.0}, {2.0, 2.0}};
  d.y = {-1.0, 0.0, 1.0};
  SolverParams p;
  p.gamma = 0.0;
  const FittedModel m = fit(d, kQcvxDec, p);
  for (double v : m.theta) CHECK(std::fabs(v) <= 1e-12);
  CHECK(in_sample_loss(m, d) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("model JSON round trip is bit exact") {
  const FittedModel m = fit(example2_data(), kQcvxDec);
  const FittedModel back = model_from_json(model_to_json(m));
  REQUIRE(back.size() == m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(back.theta[i] == m.theta[i]);
    CHECK(back.points[i] == m.points[i]);
    CHECK(predict(back, m.points[i]) == predict(m, m.points[i]));
  }
  CHECK(back.sort_perm == m.sort_perm);
  CHECK(back.stats.objective == m.stats.objective);
}

TEST_CASE("prediction keeps the quasiconvex and monotone shape") {
  SplitMix64 rng(45);
  const DataSet d = gaussian_data(rng, 8, 2);
  const FittedModel m = fit(d, kQcvxDec);
  for (int probe = 0; probe < 200; ++probe) {
    std::vector<double> a{rng.next_normal(), rng.next_normal()};
    std::vector<double> b{rng.next_normal(), rng.next_normal()};
    const double lam = rng.next_uniform();
    std::vector<double> mid{lam * a[0] + (1 - lam) * b[0], lam * a[1] + (1 - lam) * b[1]};
    CHECK(predict(m, mid) <= std::max(predict(m, a), predict(m, b)));
    // monotone decreasing: moving up cannot raise the prediction
    std::vector<double> up{a[0] + rng.next_uniform(), a[1] + rng.next_uniform()};
    CHECK(predict(m, up) <= predict(m, a));
  }
}

TEST_CASE("empty data is rejected") {
  DataSet d;
  CHECK_THROWS_AS(fit(d, kQcvxDec), std::invalid_argument);
  CHECK_THROWS_AS(fit_isotonic(d, Monotonicity::Decreasing), std::invalid_argument);
}

TEST_CASE("prediction dimension mismatch is rejected") {
  const FittedModel m = example2_model();
  CHECK_THROWS_AS(predict(m, {1.0}), std::invalid_argument);
}
