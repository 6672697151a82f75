#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dynmap/core.hpp"
#include "dynmap/metrics.hpp"
#include "dynmap/optimize.hpp"
#include "dynmap/sim.hpp"
#include "oracles.hpp"

using namespace dynmap;

namespace {

DissimilaritySequence drifting_sequence(Index n, std::size_t T, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = static_cast<int>(n);
  cfg.t = static_cast<int>(T);
  cfg.seed = seed;
  return measure_distances(simulate_paths(cfg), 0.05, seed + 1);
}

}  // namespace

TEST_CASE("equal dissimilarities give an equilateral triangle") {
  Matrix d = Matrix::Ones(3, 3);
  d.diagonal().setZero();
  FitSpec spec;
  OptimizerSettings s;
  s.tol = 1e-7;
  s.seed = 3;
  const FitResult r = fit(make_sequence({d}), spec, s);
  const Matrix dist = oracle::euclidean(r.coords.coords[0]);
  CHECK(std::abs(dist(0, 1) - dist(0, 2)) < 1e-3);
  CHECK(std::abs(dist(0, 1) - dist(1, 2)) < 1e-3);
  // Stress is a square root, so its gradient does not vanish at a perfect fit.
  CHECK(r.cost_total_final < 1e-4);
  CHECK(r.stop != StopReason::max_iterations);
}

TEST_CASE("alpha = 0 decomposes into independent fits") {
  const DissimilaritySequence d = drifting_sequence(6, 4, 5);
  FitSpec spec;
  spec.alpha = 0.0;
  spec.method_params.mds_type = MdsType::ordinal;
  OptimizerSettings s;
  s.n_iter = 300;
  s.init = random_init(6, 2, 4, 77);
  const FitResult joint = fit(d, spec, s);
  for (std::size_t t = 0; t < 4; ++t) {
    OptimizerSettings one = s;
    one.init = ConfigurationSequence{{s.init->coords[t]}};
    const FitResult single = fit(make_sequence({d.matrices[t]}), spec, one);
    CHECK(std::abs(single.static_costs[0] - joint.static_costs[t]) < 1e-6);
  }
}

TEST_CASE("accepted steps never increase the cost") {
  const DissimilaritySequence d = drifting_sequence(7, 5, 9);
  FitSpec spec;
  spec.alpha = 0.3;
  spec.p = 2;
  OptimizerSettings s;
  s.n_iter = 400;
  s.n_iter_check = 1;
  const FitResult r = fit(d, spec, s);
  for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k].cost <= r.trace[k - 1].cost);
  CHECK(r.converged == (r.grad_norm_final <= s.tol));
}

TEST_CASE("fits are deterministic") {
  const DissimilaritySequence d = drifting_sequence(6, 4, 12);
  FitSpec spec;
  spec.alpha = 0.2;
  OptimizerSettings s;
  s.n_inits = 3;
  s.seed = 4;
  const FitResult a = fit(d, spec, s);
  const FitResult b = fit(d, spec, s);
  CHECK(a.cost_total_final == b.cost_total_final);
  for (std::size_t t = 0; t < 4; ++t) CHECK((a.coords.coords[t] - b.coords.coords[t]).norm() == 0.0);
}

TEST_CASE("restart selection picks the lowest cost") {
  const DissimilaritySequence d = drifting_sequence(6, 3, 21);
  FitSpec spec;
  spec.alpha = 0.1;
  spec.method_params.mds_type = MdsType::ordinal;
  OptimizerSettings s;
  s.n_iter = 200;
  s.n_inits = 4;
  s.seed = 10;
  const FitResult multi = fit(d, spec, s);
  double best = 1e300;
  int arg = -1;
  for (int k = 0; k < 4; ++k) {
    OptimizerSettings one = s;
    one.n_inits = 1;
    one.seed = s.seed + static_cast<std::uint64_t>(k);
    const FitResult r = fit(d, spec, one);
    if (r.cost_total_final < best) {
      best = r.cost_total_final;
      arg = k;
    }
  }
  CHECK(multi.cost_total_final == best);
  CHECK(multi.init_index_selected == arg);
}

TEST_CASE("static average and per-period costs") {
  const DissimilaritySequence d = drifting_sequence(5, 3, 31);
  FitSpec spec;
  spec.alpha = 0.5;
  OptimizerSettings s;
  s.n_iter = 100;
  const FitResult r = fit(d, spec, s);
  const auto cost = make_static_cost(d, spec);
  double sum = 0.0;
  for (std::size_t t = 0; t < 3; ++t) {
    const double c = cost->evaluate(t, r.coords.coords[t], nullptr);
    CHECK(c == doctest::Approx(r.static_costs[t]).epsilon(1e-12));
    sum += c;
  }
  CHECK(r.cost_static_avg == doctest::Approx(sum / 3.0).epsilon(1e-12));
}

TEST_CASE("larger alpha lowers misalignment") {
  const DissimilaritySequence d = drifting_sequence(8, 6, 41);
  FitSpec spec;
  spec.p = 1;
  OptimizerSettings s;
  s.init = cmds_init(d, 2, nullptr, true);
  std::vector<double> mis;
  for (double alpha : {0.0, 0.05, 0.2, 0.5, 1.0}) {
    spec.alpha = alpha;
    mis.push_back(misalign_score(fit(d, spec, s).coords));
  }
  for (std::size_t k = 1; k < mis.size(); ++k) CHECK(mis[k] <= mis[k - 1] + 1e-9);
}

TEST_CASE("sammon and t-SNE fits run") {
  const DissimilaritySequence d = drifting_sequence(8, 3, 51);
  FitSpec spec;
  spec.alpha = 0.01;
  spec.method = Method::sammon;
  OptimizerSettings s;
  s.n_iter = 300;
  const FitResult a = fit(d, spec, s);
  CHECK(std::isfinite(a.cost_total_final));
  spec.method = Method::tsne;
  spec.method_params.perplexity = 3.0;
  spec.alpha = 1e-4;
  s.step_size = 0.05;
  const FitResult b = fit(d, spec, s);
  CHECK(std::isfinite(b.cost_total_final));
  spec.method_params.early_exaggeration = true;
  const FitResult c = fit(d, spec, s);
  CHECK(std::isfinite(c.cost_total_final));
}

TEST_CASE("invalid requests") {
  const DissimilaritySequence d = drifting_sequence(5, 3, 61);
  FitSpec spec;
  spec.p = 3;
  CHECK_THROWS_AS(fit(d, spec, OptimizerSettings{}), Error);
  spec.p = 1;
  OptimizerSettings s;
  s.init = random_init(4, 2, 3, 1);
  CHECK_THROWS_AS(fit(d, spec, s), Error);
  s.init.reset();
  s.step_size = 0.0;
  CHECK_THROWS_AS(fit(d, spec, s), Error);
  spec.method = Method::tsne;
  spec.method_params.perplexity = 5.0;
  CHECK_THROWS_AS(fit(d, spec, OptimizerSettings{}), Error);
}

TEST_CASE("verbosity") {
  const DissimilaritySequence d = drifting_sequence(5, 3, 71);
  FitSpec spec;
  spec.alpha = 0.1;
  OptimizerSettings s;
  s.n_iter = 120;
  s.tol = 0.0;
  s.n_iter_check = 50;
  std::ostringstream log;
  s.log = &log;
  s.verbose = 0;
  FitResult r = fit(d, spec, s);
  CHECK(log.str().empty());
  CHECK(describe_progress(r, 0).empty());
  CHECK(describe_progress(r, 1).size() == 2);

  s.verbose = 2;
  s.fixed_iterations = true;
  r = fit(d, spec, s);
  const std::vector<std::string> lines = describe_progress(r, 2);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "[MDS] Running Gradient Descent with Backtracking via Halving");
  CHECK(lines[1].rfind("[MDS] Iteration 50 -- Cost: ", 0) == 0);
  CHECK(lines[1].find(" -- Gradient Norm: ") != std::string::npos);
  CHECK(lines[2].rfind("[MDS] Iteration 100 -- Cost: ", 0) == 0);
  CHECK(lines[3].rfind("[MDS] Iteration 120: ", 0) == 0);
  CHECK(lines[3].find("Final cost: ") != std::string::npos);
  CHECK(log.str() == lines[0] + "\n" + lines[1] + "\n" + lines[2] + "\n" + lines[3] + "\n");

  FitResult fake = r;
  fake.stop = StopReason::converged;
  fake.iterations_used = 189;
  fake.cost_total_final = 3.94;
  fake.trace = {{50, 4.5, 0.1}, {100, 4.0, 0.01}, {150, 3.95, 0.001}};
  const auto l = describe_progress(fake, 2);
  REQUIRE(l.size() == 5);
  CHECK(l[4] == "[MDS] Iteration 189: gradient norm vanished. Final cost: 3.9400");
}

TEST_CASE("classical scaling initialisation") {
  const DissimilaritySequence d = drifting_sequence(6, 3, 81);
  const ConfigurationSequence a = cmds_init(d, 2);
  const ConfigurationSequence b = cmds_init(d, 2, nullptr, true);
  CHECK(a.periods_count() == 3);
  CHECK((b.coords[2] - b.coords[0]).norm() == 0.0);
  InclusionMask mask = InclusionMask::all(3, 6);
  mask.included[0][2] = 0;
  const ConfigurationSequence c = cmds_init(d, 2, &mask);
  CHECK(c.coords[0].row(2).isZero());
}
