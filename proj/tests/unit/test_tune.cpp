#include <doctest.h>

#include <cmath>
#include <random>

#include "dynmap/gp.hpp"
#include "dynmap/metrics.hpp"
#include "dynmap/sim.hpp"
#include "dynmap/tune.hpp"

using namespace dynmap;

namespace {

TuneContext small_context() {
  SimConfig cfg;
  cfg.n = 6;
  cfg.t = 5;
  cfg.seed = 3;
  TuneContext ctx;
  ctx.data = measure_distances(simulate_paths(cfg), 0.05, 4);
  ctx.settings.n_iter = 150;
  ctx.settings.init = cmds_init(ctx.data, 2, nullptr, true);
  return ctx;
}

}  // namespace

TEST_CASE("combined loss") {
  const double loss = combined_loss(0.1905, {0.0471, 0.4300}, {0.95, 0.03, 0.02});
  CHECK(loss == doctest::Approx(0.180975 + 0.001413 + 0.0086).epsilon(1e-12));
  CHECK(std::round(loss * 1e4) / 1e4 == doctest::Approx(0.1910));
  CHECK(combined_loss(0.7, {0.2, 0.3}, {1, 0, 0}) == 0.7);
  CHECK(combined_loss(0.7, {0.2, 0.3}, {0, 0, 0}) == 0.0);
  CHECK_THROWS_AS(combined_loss(0.7, {0.2}, {1, 1, 1}), Error);
  CHECK_THROWS_AS(combined_loss(0.7, {0.2}, {1, -1}), Error);
}

TEST_CASE("matern kernel and expected improvement") {
  CHECK(GaussianProcess::matern52(0.0) == 1.0);
  CHECK(GaussianProcess::matern52(1.0) < GaussianProcess::matern52(0.5));
  CHECK(expected_improvement(1.0, 0.0, 0.5) == 0.0);
  CHECK(expected_improvement(0.2, 0.0, 0.5) == doctest::Approx(0.3));
  for (double mu : {-1.0, 0.0, 0.4, 2.0}) {
    for (double sd : {0.0, 1e-3, 0.5, 3.0}) CHECK(expected_improvement(mu, sd, 0.3) >= 0.0);
  }
}

TEST_CASE("gaussian process interpolates its training points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index dims : {1, 2}) {
    Matrix x(8, dims);
    Vector y(8);
    for (Index i = 0; i < 8; ++i) {
      for (Index k = 0; k < dims; ++k) x(i, k) = unif(rng);
      y(i) = std::sin(5.0 * x(i, 0)) + (dims > 1 ? x(i, 1) * x(i, 1) : 0.0);
    }
    GaussianProcess gp;
    gp.fit(x, y);
    for (Index i = 0; i < 8; ++i) {
      const auto pred = gp.predict(x.row(i));
      CHECK(std::abs(pred.mean - y(i)) <= 1e-4);
      CHECK(pred.sd >= 0.0);
    }
    CHECK(gp.length_scales().size() == dims);
  }
}

TEST_CASE("halton points lie in the unit cube") {
  const Eigen::RowVectorXd shift = Eigen::RowVectorXd::Constant(2, 0.3);
  for (std::uint64_t i = 1; i < 50; ++i) {
    const Eigen::RowVectorXd p = halton_point(i, 2, shift);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.maxCoeff() < 1.0);
  }
  CHECK(halton_point(1, 1, Eigen::RowVectorXd::Zero(1))(0) == doctest::Approx(0.5));
}

TEST_CASE("bayesian minimization of a quadratic") {
  const SearchSpace space{{"x", -2.0, 3.0, false}};
  const Objective f = [](const std::vector<double>& v) { return (v[0] - 0.7) * (v[0] - 0.7); };
  BayesSettings bs;
  bs.seed = 11;
  const BayesTrace trace = bayesian_minimize(space, f, bs);
  CHECK(trace.values.size() == 20);
  // Dense grid oracle for the minimizer.
  double arg = -2.0;
  for (int i = 0; i <= 50000; ++i) {
    const double v = -2.0 + 5.0 * i / 50000.0;
    if (f({v}) < f({arg})) arg = v;
  }
  CHECK(std::abs(trace.points[trace.best][0] - arg) < 0.05);

  const BayesTrace again = bayesian_minimize(space, f, bs);
  CHECK(again.points == trace.points);
  CHECK(again.best == trace.best);
}

TEST_CASE("pure quasi-random search picks the best sample") {
  const SearchSpace space{{"a", 0.0, 1.0, false}, {"k", 1.0, 4.0, true}};
  const Objective f = [](const std::vector<double>& v) { return std::abs(v[0] - 0.2) + v[1]; };
  BayesSettings bs;
  bs.n_calls = 5;
  bs.n_initial_points = 5;
  const BayesTrace trace = bayesian_minimize(space, f, bs);
  REQUIRE(trace.values.size() == 5);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(trace.points[i][1] == std::round(trace.points[i][1]));
    if (trace.values[i] < trace.values[arg]) arg = i;
  }
  CHECK(trace.best == arg);
}

TEST_CASE("bayesian settings are validated") {
  const SearchSpace space{{"x", 0.0, 1.0, false}};
  const Objective f = [](const std::vector<double>& v) { return v[0]; };
  BayesSettings bs;
  bs.n_initial_points = 0;
  CHECK_THROWS_AS(bayesian_minimize(space, f, bs), Error);
  bs.n_initial_points = 5;
  bs.n_calls = 3;
  CHECK_THROWS_AS(bayesian_minimize(space, f, bs), Error);
  CHECK_THROWS_AS(bayesian_minimize(SearchSpace{{"x", 1.0, 0.0, false}}, f, BayesSettings{}), Error);
}

TEST_CASE("constant objective gives constant losses") {
  const SearchSpace space{{"x", 0.0, 1.0, false}};
  BayesSettings bs;
  bs.n_calls = 6;
  const BayesTrace trace = bayesian_minimize(space, [](const std::vector<double>&) { return 2.5; }, bs);
  for (double v : trace.values) CHECK(v == 2.5);
}

TEST_CASE("grid search shape and single-point equivalence") {
  TuneContext ctx = small_context();
  std::vector<double> alphas;
  for (int i = 0; i < 15; ++i) alphas.push_back(1.5 * i / 14.0);
  const TuneResult grid = grid_search(ctx, {{"alpha", alphas}, {"p", {1, 2}}});
  CHECK(grid.rows.size() == 30);
  CHECK_FALSE(grid.best_row.has_value());
  for (const TuneRow& row : grid.rows) {
    CHECK(row.error.empty());
    CHECK(std::isfinite(row.cost_static_avg));
    for (const auto& [name, v] : row.metrics) CHECK(std::isfinite(v));
  }

  const TuneResult one = grid_search(ctx, {{"alpha", {0.4}}, {"p", {2}}});
  REQUIRE(one.rows.size() == 1);
  FitSpec spec = ctx.spec;
  spec.alpha = 0.4;
  spec.p = 2;
  const FitResult direct = fit(ctx.data, spec, ctx.settings);
  CHECK(one.rows[0].cost_static_avg == direct.cost_static_avg);
  CHECK(one.rows[0].metrics.at("misalign") == misalign_score(direct.coords));
  CHECK(one.rows[0].metrics.at("persistence_inverted") == doctest::Approx(1.0 - persistence_score(direct.coords)));
}

TEST_CASE("grid over alpha lowers misalignment") {
  TuneContext ctx = small_context();
  const TuneResult r = grid_search(ctx, {{"alpha", {0.0, 2.0}}}, {1.0, 0.0, 0.0});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1].metrics.at("misalign") < r.rows[0].metrics.at("misalign"));
  REQUIRE(r.best_row.has_value());
  CHECK(*r.best_row == 0);  // static cost alone prefers the unconstrained fit
}

TEST_CASE("invalid tuning inputs") {
  TuneContext ctx = small_context();
  CHECK_THROWS_AS(grid_search(ctx, {{"bogus", {1.0}}}), Error);
  CHECK_THROWS_AS(grid_search(ctx, {}), Error);
  ctx.metrics = {"nonsense"};
  CHECK_THROWS_AS(grid_search(ctx, {{"alpha", {0.1}}}), Error);
  CHECK_FALSE(is_tunable("dims"));
  CHECK(is_tunable("perplexity"));
}

TEST_CASE("failed grid cells become error rows") {
  TuneContext ctx = small_context();
  const TuneResult r = grid_search(ctx, {{"p", {1, 9}}});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].error.empty());
  CHECK_FALSE(r.rows[1].error.empty());
  CHECK_THROWS_AS(grid_search(ctx, {{"p", {9}}}), Error);
}

TEST_CASE("bayesian search over a fit is deterministic") {
  TuneContext ctx = small_context();
  BayesSettings bs;
  bs.n_calls = 5;
  bs.n_initial_points = 3;
  bs.seed = 2;
  const SearchSpace space{{"alpha", 0.0, 1.0, false}, {"p", 1.0, 2.0, true}};
  const TuneResult a = bayesian_search(ctx, space, {0.95, 0.03, 0.02}, bs);
  const TuneResult b = bayesian_search(ctx, space, {0.95, 0.03, 0.02}, bs);
  REQUIRE(a.rows.size() == 5);
  REQUIRE(a.best_row.has_value());
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.rows[i].params == b.rows[i].params);
    CHECK(*a.rows[*a.best_row].combined_loss <= *a.rows[i].combined_loss);
  }
  CHECK(a.best_row == b.best_row);
}
