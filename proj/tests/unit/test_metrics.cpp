#include <doctest.h>

#include <cmath>
#include <random>

#include "dynmap/metrics.hpp"
#include "oracles.hpp"

using namespace dynmap;

namespace {

ConfigurationSequence path(const std::vector<std::vector<double>>& xs) {
  // xs[t] holds the 2-D position of a single object at period t.
  ConfigurationSequence c;
  for (const auto& p : xs) {
    Matrix m(1, 2);
    m << p[0], p[1];
    c.coords.push_back(m);
  }
  return c;
}

}  // namespace

TEST_CASE("misalignment") {
  ConfigurationSequence c;
  c.coords.assign(4, Matrix::Constant(3, 2, 1.0));
  CHECK(misalign_score(c) == 0.0);
  const ConfigurationSequence walk = path({{0, 0}, {1, 0}, {1, 1}});
  CHECK(misalign_score(walk) == doctest::Approx(1.0));
  CHECK(misalign_score(walk, nullptr, MisalignAggregate::total) == doctest::Approx(2.0));
  ConfigurationSequence one = walk;
  one.coords.resize(1);
  CHECK_THROWS_AS(misalign_score(one), Error);

  std::mt19937_64 rng(1);
  ConfigurationSequence r;
  for (int t = 0; t < 4; ++t) r.coords.push_back(oracle::random_matrix(5, 2, rng));
  ConfigurationSequence scaled = r;
  for (Matrix& m : scaled.coords) m *= 3.0;
  CHECK(misalign_score(scaled) == doctest::Approx(3.0 * misalign_score(r)).epsilon(1e-12));
}

TEST_CASE("alignment") {
  CHECK(align_score(path({{1, 2}, {1, 2}, {1, 2}})) == doctest::Approx(1.0));
  CHECK(align_score(path({{1, 2}, {-1, -2}, {1, 2}})) == doctest::Approx(-1.0));
  CHECK(std::abs(align_score(path({{1, 0}, {0, 1}, {-1, 0}}))) < 1e-15);
  CHECK_THROWS_AS(align_score(path({{0, 0}, {0, 0}})), Error);
}

TEST_CASE("persistence") {
  CHECK(persistence_score(path({{0, 0}, {1, 2}, {2, 4.5}, {3, 6}})) > 0.5);
  ConfigurationSequence line;
  for (int t = 0; t < 5; ++t) {
    Matrix m(2, 2);
    m << t * 1.0, t * 0.5, 2.0 - t, 3.0 * t;
    line.coords.push_back(m);
  }
  CHECK(persistence_score(line) == doctest::Approx(1.0).epsilon(1e-12));
  ConfigurationSequence zig;
  for (int t = 0; t < 6; ++t) {
    Matrix m(2, 2);
    const double s = t % 2 == 0 ? 0.0 : 1.0;
    m << s, 2 * s, -s + 4, 0.5 * s;
    zig.coords.push_back(m);
  }
  CHECK(persistence_score(zig) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_THROWS_AS(persistence_score(path({{0, 0}, {1, 1}})), Error);

  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    ConfigurationSequence r;
    for (int t = 0; t < 5; ++t) r.coords.push_back(oracle::random_matrix(4, 2, rng));
    const double p = persistence_score(r);
    CHECK(p >= -1.0);
    CHECK(p <= 1.0);
    const double q = persistence_score(r, nullptr, PersistenceMode::per_object);
    CHECK(q >= -1.0);
    CHECK(q <= 1.0);
    const double a = align_score(r);
    CHECK(a >= -1.0);
    CHECK(a <= 1.0);
  }
}

TEST_CASE("hit-rate against brute-force neighbours") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 4 + rep % 5;
    const Matrix x = oracle::random_matrix(n, 2, rng);
    const Matrix delta = oracle::random_dissimilarity(n, rng);
    for (int k = 1; k < n; ++k) CHECK(hitrate_score(x, delta, k) == doctest::Approx(oracle::hitrate(x, delta, k)).epsilon(1e-15));
  }
  const Matrix pts = oracle::random_matrix(6, 2, rng);
  CHECK(hitrate_score(pts, oracle::euclidean(pts), 2) == 1.0);
  const Matrix three = oracle::random_matrix(3, 2, rng);
  CHECK(hitrate_score(three, oracle::random_dissimilarity(3, rng), 2) == 1.0);
  CHECK_THROWS_AS(hitrate_score(three, oracle::random_dissimilarity(3, rng), 3), Error);
  CHECK_THROWS_AS(hitrate_score(three, oracle::random_dissimilarity(3, rng), 0), Error);
}

TEST_CASE("hit-rate with ties uses the lower index") {
  // Object 0 is equidistant from 1 and 2 in the data; its neighbour is 1.
  Matrix delta(4, 4);
  delta << 0, 1, 1, 2, 1, 0, 2, 1, 1, 2, 0, 3, 2, 1, 3, 0;
  Matrix x(4, 1);
  x << 0, 1.0, -0.5, 2.0;
  CHECK(hitrate_score(x, delta, 1) == doctest::Approx(oracle::hitrate(x, delta, 1)));
}

TEST_CASE("rank-based invariance of the hit-rate") {
  std::mt19937_64 rng(4);
  const Matrix x = oracle::random_matrix(7, 2, rng);
  const Matrix delta = oracle::random_dissimilarity(7, rng);
  const Matrix warped = delta.array().cube().matrix() * 5.0;
  for (int k = 1; k < 6; ++k) CHECK(hitrate_score(x, delta, k) == hitrate_score(x, warped, k));
}

TEST_CASE("adjusted hit-rate") {
  std::mt19937_64 rng(5);
  const Matrix pts = oracle::random_matrix(6, 2, rng);
  CHECK(adjusted_hitrate_score(pts, oracle::euclidean(pts), 2) == 1.0);
  // K=5, n=21: c = 0.25, HR = 0.75 -> 2/3. Checked through the formula.
  const double c = 5.0 / 20.0;
  CHECK((0.75 - c) / (1 - c) == doctest::Approx(2.0 / 3.0));
  const Matrix three = oracle::random_matrix(3, 2, rng);
  CHECK_THROWS_AS(adjusted_hitrate_score(three, oracle::random_dissimilarity(3, rng), 2), Error);

  // n = 3, K = 1, c = 1/2: a map below chance clamps to 0.
  Matrix delta(3, 3);
  delta << 0, 1, 2, 1, 0, 3, 2, 3, 0;
  Matrix x(3, 1);
  x << 0, 10, 1;
  CHECK(hitrate_score(x, delta, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(adjusted_hitrate_score(x, delta, 1) == 0.0);

  // n = 5, K = 2, c = 1/2: data on a line, map a permuted line with HR = 1/2 exactly.
  Matrix line(5, 1);
  line << 0, 1, 2, 3, 4;
  Matrix y(5, 1);
  y << 0, 2.01, 3.03, 4.06, 1.1;
  CHECK(hitrate_score(y, oracle::euclidean(line), 2) == 0.5);
  CHECK(adjusted_hitrate_score(y, oracle::euclidean(line), 2) == 0.0);
}

TEST_CASE("per-period averages and masks") {
  std::mt19937_64 rng(6);
  const Matrix pts = oracle::random_matrix(5, 2, rng);
  ConfigurationSequence x;
  x.coords.assign(3, pts);
  const DissimilaritySequence d = make_sequence({oracle::euclidean(pts), oracle::euclidean(pts), oracle::euclidean(pts)});
  CHECK(avg_hitrate_score(x, d, 2) == doctest::Approx(hitrate_score(pts, d.matrices[0], 2)));

  // Masked object: placeholders and coordinates of absent entries are ignored.
  InclusionMask mask = InclusionMask::all(3, 5);
  mask.included[1][4] = 0;
  ConfigurationSequence y;
  DissimilaritySequence e = d;
  for (int t = 0; t < 3; ++t) y.coords.push_back(oracle::random_matrix(5, 2, rng));
  ConfigurationSequence y2 = y;
  y2.coords[1].row(4) << 99, -99;
  DissimilaritySequence e2 = e;
  for (Index j = 0; j < 4; ++j) e2.matrices[1](4, j) = e2.matrices[1](j, 4) = 50.0 + j;
  CHECK(avg_hitrate_score(y, e, 2, &mask) == avg_hitrate_score(y2, e2, 2, &mask));
  CHECK(avg_adjusted_hitrate_score(y, e, 2, &mask) == avg_adjusted_hitrate_score(y2, e2, 2, &mask));
  CHECK(misalign_score(y, &mask) == misalign_score(y2, &mask));
  CHECK(persistence_score(y, &mask) == persistence_score(y2, &mask));
  CHECK(align_score(y, &mask) == align_score(y2, &mask));

  // Masked value equals the value on the included submatrix.
  const std::vector<double> h = hitrates(y, e, 2, &mask);
  const std::vector<Index> keep = {0, 1, 2, 3};
  CHECK(h[1] == hitrate_score(gather_rows(y.coords[1], keep), gather_square(e.matrices[1], keep), 2));
}

TEST_CASE("evaluate skips undefined metrics") {
  std::mt19937_64 rng(7);
  ConfigurationSequence x;
  x.coords = {oracle::random_matrix(4, 2, rng), oracle::random_matrix(4, 2, rng)};
  const DissimilaritySequence d = make_sequence({oracle::random_dissimilarity(4, rng), oracle::random_dissimilarity(4, rng)});
  const EvalReport r = evaluate(x, d, EvalOptions{});
  CHECK(r.values.count("misalign") == 1);
  CHECK(r.values.count("persistence") == 0);
  CHECK(std::find(r.skipped.begin(), r.skipped.end(), "persistence") != r.skipped.end());
  CHECK(default_k(4) == 3);
  CHECK(default_k(40) == 5);
}
