#include <doctest.h>

#include <random>

#include "dynmap/kernels.hpp"
#include "oracles.hpp"

using namespace dynmap;
namespace k = dynmap::kernels;

TEST_CASE("reference and parallel kernels agree") {
  std::mt19937_64 rng(2);
  for (int n : {2, 3, 7, 25}) {
    const Matrix x = oracle::random_matrix(n, 2, rng);
    const Matrix delta = oracle::random_dissimilarity(n, rng);
    Matrix ga, gb;

    CHECK((k::reference::distances(x) - k::omp::distances(x)).norm() < 1e-12);

    double a = k::reference::stress_fixed(x, delta, &ga);
    double b = k::omp::stress_fixed(x, delta, &gb);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK((ga - gb).norm() < 1e-10);

    a = k::reference::sammon(x, delta, &ga);
    b = k::omp::sammon(x, delta, &gb);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK((ga - gb).norm() < 1e-10);

    const double perp = std::max(1.5, n / 3.0);
    const k::Conditionals ca = k::reference::tsne_conditionals(delta, perp);
    const k::Conditionals cb = k::omp::tsne_conditionals(delta, perp);
    CHECK((ca.p - cb.p).norm() == 0.0);
    Matrix p = (ca.p + ca.p.transpose()) / (2.0 * n);
    a = k::reference::tsne_kl(x, p, &ga);
    b = k::omp::tsne_kl(x, p, &gb);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK((ga - gb).norm() < 1e-10);
  }
}

TEST_CASE("parallel kernels are bit-reproducible") {
  std::mt19937_64 rng(4);
  const Matrix x = oracle::random_matrix(40, 2, rng);
  const Matrix delta = oracle::random_dissimilarity(40, rng);
  Matrix g1, g2;
  const double a = k::omp::stress_fixed(x, delta, &g1);
  const double b = k::omp::stress_fixed(x, delta, &g2);
  CHECK(a == b);
  CHECK((g1 - g2).norm() == 0.0);
}

TEST_CASE("conditional probabilities are row-stochastic with the target entropy") {
  std::mt19937_64 rng(6);
  const Matrix delta = oracle::random_dissimilarity(12, rng);
  const double perp = 4.0;
  const k::Conditionals c = k::tsne_conditionals(delta, perp);
  CHECK_FALSE(c.unconverged);
  for (Index i = 0; i < 12; ++i) {
    CHECK(c.p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.p(i, i) == 0.0);
    double h = 0.0;
    for (Index j = 0; j < 12; ++j) {
      if (c.p(i, j) > 0) h -= c.p(i, j) * std::log(c.p(i, j));
    }
    CHECK(h == doctest::Approx(std::log(perp)).epsilon(1e-4));
  }
}

TEST_CASE("degenerate configuration is reported") {
  const Matrix x = Matrix::Zero(3, 2);
  Matrix delta = Matrix::Ones(3, 3);
  delta.diagonal().setZero();
  CHECK_THROWS_AS(k::stress_fixed(x, delta, nullptr), Error);
}
