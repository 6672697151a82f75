#include <doctest.h>

#include <cmath>
#include <set>

#include "dynmap/preprocess.hpp"
#include "dynmap/sim.hpp"
#include "dynmap/static_methods.hpp"

using namespace dynmap;

TEST_CASE("default simulation shape and reproducibility") {
  SimConfig cfg;
  cfg.seed = 8;
  const ConfigurationSequence a = simulate_paths(cfg);
  CHECK(a.periods_count() == 10);
  for (const Matrix& m : a.coords) {
    CHECK(m.rows() == 6);
    CHECK(m.cols() == 2);
  }
  const ConfigurationSequence b = simulate_paths(cfg);
  for (std::size_t t = 0; t < 10; ++t) CHECK((a.coords[t] - b.coords[t]).norm() == 0.0);
  cfg.seed = 9;
  CHECK((simulate_paths(cfg).coords[0] - a.coords[0]).norm() > 0.0);
}

TEST_CASE("zero step noise gives constant paths") {
  SimConfig cfg;
  cfg.noise = 0.0;
  const ConfigurationSequence x = simulate_paths(cfg);
  for (std::size_t t = 1; t < x.periods_count(); ++t) CHECK((x.coords[t] - x.coords[0]).norm() == 0.0);
}

TEST_CASE("zero momentum gives uncorrelated increments") {
  SimConfig cfg;
  cfg.momentum = 0.0;
  cfg.n = 10;
  cfg.t = 12;
  double sxy = 0.0, sxx = 0.0, syy = 0.0, sx = 0.0, sy = 0.0;
  double count = 0.0;
  for (std::uint64_t seed = 0; seed < 100 && count < 1e4; ++seed) {
    cfg.seed = seed;
    const ConfigurationSequence x = simulate_paths(cfg);
    for (std::size_t t = 2; t < x.periods_count(); ++t) {
      const Matrix d1 = x.coords[t - 1] - x.coords[t - 2];
      const Matrix d2 = x.coords[t] - x.coords[t - 1];
      for (Index i = 0; i < d1.rows(); ++i) {
        for (Index k = 0; k < 2; ++k) {
          sx += d1(i, k);
          sy += d2(i, k);
          sxx += d1(i, k) * d1(i, k);
          syy += d2(i, k) * d2(i, k);
          sxy += d1(i, k) * d2(i, k);
          count += 1.0;
        }
      }
    }
  }
  CHECK(count >= 1e4);
  const double cov = sxy / count - (sx / count) * (sy / count);
  const double rho = cov / std::sqrt((sxx / count - sx * sx / (count * count)) * (syy / count - sy * sy / (count * count)));
  CHECK(std::abs(rho) < 0.1);
}

TEST_CASE("simulation config validation") {
  SimConfig cfg;
  cfg.momentum = 1.0;
  CHECK_THROWS_AS(simulate_paths(cfg), Error);
  cfg.momentum = 0.5;
  cfg.n = 1;
  CHECK_THROWS_AS(simulate_paths(cfg), Error);
  cfg.n = 4;
  cfg.t = 1;
  CHECK_THROWS_AS(simulate_paths(cfg), Error);
}

TEST_CASE("measured distances") {
  SimConfig cfg;
  cfg.seed = 2;
  const ConfigurationSequence x = simulate_paths(cfg);
  const DissimilaritySequence exact = measure_distances(x, 0.0, 1);
  const DissimilaritySequence noisy = measure_distances(x, 0.3, 1);
  for (std::size_t t = 0; t < 10; ++t) {
    for (const DissimilaritySequence* d : {&exact, &noisy}) {
      const Matrix& m = d->matrices[t];
      CHECK((m - m.transpose()).norm() == 0.0);
      CHECK(m.diagonal().isZero());
    }
    const Matrix& m = exact.matrices[t];
    for (Index i = 0; i < 6; ++i) {
      for (Index j = 0; j < 6; ++j) {
        CHECK(m(i, j) == doctest::Approx((x.coords[t].row(i) - x.coords[t].row(j)).norm()));
        for (Index k = 0; k < 6; ++k) CHECK(m(i, j) <= m(i, k) + m(k, j) + 1e-12);
      }
    }
  }
  CHECK((noisy.matrices[0] - exact.matrices[0]).norm() > 0.0);
}

TEST_CASE("exact distances are fitted almost perfectly") {
  SimConfig cfg;
  cfg.seed = 4;
  const DissimilaritySequence d = measure_distances(simulate_paths(cfg), 0.0, 0);
  FitSpec spec;
  spec.alpha = 0.2;
  spec.p = 1;
  OptimizerSettings s;
  s.n_inits = 3;
  CHECK(fit(d, spec, s).cost_static_avg < 0.02);
}

TEST_CASE("procrustes distance to itself is zero") {
  SimConfig cfg;
  const ConfigurationSequence x = simulate_paths(cfg);
  CHECK(mean_procrustes_distance(x, x) < 1e-12);
  ConfigurationSequence moved = x;
  for (Matrix& m : moved.coords) m = (2.0 * m).rowwise() + Eigen::RowVector2d(1.0, -3.0);
  CHECK(mean_procrustes_distance(moved, x) < 1e-12);
}

TEST_CASE("noiseless recovery") {
  RecoveryOptions opt = default_recovery_options();
  opt.noise_levels = {0.0};
  opt.alpha_levels = {0.0};
  opt.reps = 3;
  opt.settings.n_inits = 4;
  const std::vector<RecoveryCell> cells = recovery_study(opt);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].reps == 3);
  CHECK(cells[0].failures == 0);
  CHECK(cells[0].procrustes < 1e-2);
  CHECK(cells[0].stress < 0.05);
}

TEST_CASE("recovery cells follow the input order") {
  RecoveryOptions opt = default_recovery_options();
  opt.noise_levels = {0.2, 0.01};
  opt.alpha_levels = {0.5, 0.0};
  opt.reps = 1;
  opt.settings.n_inits = 1;
  opt.settings.n_iter = 100;
  const std::vector<RecoveryCell> cells = recovery_study(opt);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].noise == 0.2);
  CHECK(cells[0].alpha == 0.5);
  CHECK(cells[1].alpha == 0.0);
  CHECK(cells[3].noise == 0.01);
  opt.reps = 0;
  CHECK_THROWS_AS(recovery_study(opt), Error);
}

TEST_CASE("small runtime benchmark") {
  BenchOptions opt;
  opt.n_list = {5, 8};
  opt.t_list = {3};
  opt.iterations = 20;
  const std::vector<BenchCell> cells = runtime_benchmark(opt);
  REQUIRE(cells.size() == 2);
  for (const BenchCell& c : cells) {
    CHECK(c.t == 3);
    CHECK(c.joint_seconds > 0.0);
    CHECK(c.independent_seconds > 0.0);
  }
  opt.n_list.clear();
  CHECK_THROWS_AS(runtime_benchmark(opt), Error);
}

TEST_CASE("synthetic technology edgelist") {
  const std::vector<EdgeRow> rows = synthetic_tech_edgelist();
  std::set<std::string> periods;
  std::set<std::string> ids;
  for (const EdgeRow& r : rows) {
    periods.insert(r.period);
    ids.insert(r.id_i);
    ids.insert(r.id_j);
    CHECK(r.score >= 0.002);
    CHECK(r.score <= 0.6);
  }
  CHECK(periods.size() == 20);
  CHECK(ids.size() == 9);
  CHECK(rows.size() == 20 * 36);

  const std::vector<EdgeRow> again = synthetic_tech_edgelist();
  REQUIRE(again.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) CHECK(again[k].score == rows[k].score);

  const std::vector<EdgeRow> unbalanced = synthetic_tech_edgelist(7, true);
  const ExpandedSequence e = expand_matrices(edgelist_to_matrices(unbalanced));
  CHECK(e.sequence.objects() == 10);
  CHECK(e.mask.included.size() == 20);
  CHECK_FALSE(e.mask.contains(0, 9));
  CHECK(e.mask.contains(19, 9));
  for (Index i = 0; i < 9; ++i) CHECK(e.mask.contains(0, i));
}
