#include "dynmap/static_methods.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dynmap {

CmdsResult cmds(const Matrix& delta, int dims) {
  const Index n = delta.rows();
  if (delta.cols() != n) fail(ErrorKind::config, "cmds needs a square matrix");
  if (dims < 1 || dims > n - 1) fail(ErrorKind::config, "cmds dimensionality must lie in [1, n-1]");

  const Matrix sq = delta.array().square().matrix();
  const Vector row_mean = sq.rowwise().mean();
  const Vector col_mean = sq.colwise().mean().transpose();
  const double grand = sq.mean();
  Matrix b(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) b(i, j) = -0.5 * (sq(i, j) - row_mean(i) - col_mean(j) + grand);
  }
  b = 0.5 * (b + b.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(b);
  if (solver.info() != Eigen::Success) fail(ErrorKind::domain, "eigendecomposition failed in cmds");
  // Eigen returns ascending order.
  const Vector values = solver.eigenvalues().reverse();
  const Matrix vectors = solver.eigenvectors().rowwise().reverse();

  CmdsResult out;
  out.eigenvalues = values;
  out.coords = Matrix::Zero(n, dims);
  const double tiny = 1e-12 * std::max(1.0, std::abs(values(0)));
  for (int k = 0; k < dims; ++k) {
    const double lambda = values(k);
    if (lambda <= tiny) {
      out.zero_padded = true;
      continue;
    }
    Vector v = vectors.col(k);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.coords.col(k) = v * std::sqrt(lambda);
  }
  return out;
}

Vector pava(const Vector& y, const Vector& weights) {
  const Index n = y.size();
  if (weights.size() != n) fail(ErrorKind::config, "pava: weights length does not match values");
  // Blocks as (weighted mean, total weight, length).
  std::vector<double> mean;
  std::vector<double> weight;
  std::vector<Index> length;
  mean.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    mean.push_back(y(i));
    weight.push_back(weights(i));
    length.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
      const std::size_t a = mean.size() - 2;
      const double w = weight[a] + weight.back();
      mean[a] = (mean[a] * weight[a] + mean.back() * weight.back()) / w;
      weight[a] = w;
      length[a] += length.back();
      mean.pop_back();
      weight.pop_back();
      length.pop_back();
    }
  }
  Vector out(n);
  Index pos = 0;
  for (std::size_t b = 0; b < mean.size(); ++b) {
    for (Index k = 0; k < length[b]; ++k) out(pos++) = mean[b];
  }
  return out;
}

Vector pava(const Vector& y) { return pava(y, Vector::Ones(y.size())); }

namespace {

struct Pair {
  Index i;
  Index j;
};

std::vector<Pair> upper_pairs(Index n) {
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) pairs.push_back({i, j});
  }
  return pairs;
}

}  // namespace

Matrix fit_disparities_raw(const Matrix& dist, const Matrix& delta, MdsType type) {
  const Index n = delta.rows();
  Matrix dhat = Matrix::Zero(n, n);
  const std::vector<Pair> pairs = upper_pairs(n);
  if (pairs.empty()) return dhat;

  switch (type) {
    case MdsType::ratio: {
      double cross = 0.0;
      double norm = 0.0;
      for (const Pair& pr : pairs) {
        cross += dist(pr.i, pr.j) * delta(pr.i, pr.j);
        norm += delta(pr.i, pr.j) * delta(pr.i, pr.j);
      }
      const double b = norm > 0.0 ? std::max(0.0, cross / norm) : 0.0;
      dhat = b * delta;
      break;
    }
    case MdsType::interval: {
      const double m = static_cast<double>(pairs.size());
      double mean_delta = 0.0;
      double mean_dist = 0.0;
      for (const Pair& pr : pairs) {
        mean_delta += delta(pr.i, pr.j);
        mean_dist += dist(pr.i, pr.j);
      }
      mean_delta /= m;
      mean_dist /= m;
      double cov = 0.0;
      double var = 0.0;
      for (const Pair& pr : pairs) {
        cov += (delta(pr.i, pr.j) - mean_delta) * (dist(pr.i, pr.j) - mean_dist);
        var += (delta(pr.i, pr.j) - mean_delta) * (delta(pr.i, pr.j) - mean_delta);
      }
      const double b = var > 0.0 ? std::max(0.0, cov / var) : 0.0;
      const double a = mean_dist - b * mean_delta;
      for (const Pair& pr : pairs) dhat(pr.i, pr.j) = dhat(pr.j, pr.i) = std::max(0.0, a + b * delta(pr.i, pr.j));
      break;
    }
    case MdsType::ordinal: {
      std::vector<std::size_t> order(pairs.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = delta(pairs[a].i, pairs[a].j);
        const double db = delta(pairs[b].i, pairs[b].j);
        if (da != db) return da < db;
        return dist(pairs[a].i, pairs[a].j) < dist(pairs[b].i, pairs[b].j);
      });
      Vector y(static_cast<Index>(order.size()));
      for (std::size_t k = 0; k < order.size(); ++k) y(static_cast<Index>(k)) = dist(pairs[order[k]].i, pairs[order[k]].j);
      const Vector fitted = pava(y);
      for (std::size_t k = 0; k < order.size(); ++k) {
        const Pair& pr = pairs[order[k]];
        dhat(pr.i, pr.j) = dhat(pr.j, pr.i) = fitted(static_cast<Index>(k));
      }
      break;
    }
  }
  return dhat;
}

Matrix fit_disparities(const Matrix& dist, const Matrix& delta, MdsType type) {
  if (type == MdsType::ratio) return delta;
  Matrix dhat = fit_disparities_raw(dist, delta, type);
  const double target = delta.squaredNorm();
  const double current = dhat.squaredNorm();
  if (current > 0.0 && target > 0.0) dhat *= std::sqrt(target / current);
  return dhat;
}

StressResult mds_stress(const Matrix& x, const Matrix& delta, MdsType type, kernels::Exec exec) {
  const Matrix dist = kernels::distances(x, exec);
  StressResult out;
  out.disparities = fit_disparities(dist, delta, type);
  out.stress = kernels::stress_fixed(x, out.disparities, nullptr, exec);
  return out;
}

Matrix mds_gradient(const Matrix& x, const Matrix& delta, MdsType type, kernels::Exec exec) {
  const Matrix dist = kernels::distances(x, exec);
  const Matrix dhat = fit_disparities(dist, delta, type);
  Matrix grad;
  kernels::stress_fixed(x, dhat, &grad, exec);
  return grad;
}

void require_positive_offdiag(const Matrix& delta) {
  for (Index i = 0; i < delta.rows(); ++i) {
    for (Index j = 0; j < delta.cols(); ++j) {
      if (i != j && !(delta(i, j) > 0.0)) {
        fail(ErrorKind::domain, "Sammon mapping needs positive dissimilarities; entry (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") is not");
      }
    }
  }
}

double sammon_cost(const Matrix& x, const Matrix& delta) {
  require_positive_offdiag(delta);
  return kernels::sammon(x, delta, nullptr);
}

Matrix sammon_gradient(const Matrix& x, const Matrix& delta) {
  require_positive_offdiag(delta);
  Matrix grad;
  kernels::sammon(x, delta, &grad);
  return grad;
}

TsneAffinities tsne_p_matrix(const Matrix& delta, double perplexity, kernels::Exec exec) {
  const Index n = delta.rows();
  if (!(perplexity > 0.0) || perplexity >= static_cast<double>(n)) {
    fail(ErrorKind::hyperparameter, "perplexity must lie in (0, n); n = " + std::to_string(n));
  }
  kernels::Conditionals cond = kernels::tsne_conditionals(delta, perplexity, exec);
  TsneAffinities out;
  out.unconverged = cond.unconverged;
  out.p = (cond.p + cond.p.transpose()) / (2.0 * static_cast<double>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out.p(i, j) = (i == j) ? 0.0 : std::max(out.p(i, j), 1e-12);
  }
  return out;
}

double tsne_cost(const Matrix& x, const Matrix& p) { return kernels::tsne_kl(x, p, nullptr); }

Matrix tsne_gradient(const Matrix& x, const Matrix& p) {
  Matrix grad;
  kernels::tsne_kl(x, p, &grad);
  return grad;
}

}  // namespace dynmap
