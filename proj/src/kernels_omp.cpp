#include <cmath>
#include <limits>
#include <vector>

#include "dynmap/kernels.hpp"
#include "kernels_detail.hpp"

namespace dynmap::kernels {

namespace omp {

using detail::row_distance;
using detail::sq;

namespace {

// Serial, fixed-order sum of per-row partials.
double ordered_sum(const std::vector<double>& parts) {
  double s = 0.0;
  for (double v : parts) s += v;
  return s;
}

}  // namespace

Matrix distances(const Matrix& x) {
  const Index n = x.rows();
  Matrix d(n, n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) d(i, j) = (i == j) ? 0.0 : row_distance(x, i, j);
  }
  return d;
}

double stress_fixed(const Matrix& x, const Matrix& dhat, Matrix* grad) {
  const Index n = x.rows();
  const Index dims = x.cols();
  const Matrix d = distances(x);
  std::vector<double> num_rows(static_cast<std::size_t>(n), 0.0);
  std::vector<double> den_rows(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double num = 0.0;
    double den = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      num += sq(d(i, j) - dhat(i, j));
      den += sq(d(i, j));
    }
    num_rows[static_cast<std::size_t>(i)] = num;
    den_rows[static_cast<std::size_t>(i)] = den;
  }
  const double num = ordered_sum(num_rows);
  const double den = ordered_sum(den_rows);
  if (den <= 0.0) fail(ErrorKind::degenerate, "all map distances are zero");
  const double stress = std::sqrt(num / den);
  if (grad == nullptr) return stress;
  grad->setZero(n, dims);
  if (stress == 0.0) return stress;
  const double scale = 1.0 / (2.0 * stress * den * den);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j == i || d(i, j) == 0.0) continue;
      const double coef = scale * (2.0 * (d(i, j) - dhat(i, j)) / d(i, j) * den - 2.0 * num);
      for (Index k = 0; k < dims; ++k) (*grad)(i, k) += coef * (x(i, k) - x(j, k));
    }
  }
  return stress;
}

double sammon(const Matrix& x, const Matrix& delta, Matrix* grad) {
  const Index n = x.rows();
  const Index dims = x.cols();
  const Matrix d = distances(x);
  std::vector<double> c_rows(static_cast<std::size_t>(n), 0.0);
  std::vector<double> raw_rows(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double c = 0.0;
    double raw = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      c += delta(i, j);
      raw += sq(d(i, j) - delta(i, j)) / delta(i, j);
    }
    c_rows[static_cast<std::size_t>(i)] = c;
    raw_rows[static_cast<std::size_t>(i)] = raw;
  }
  const double c = ordered_sum(c_rows);
  const double cost = ordered_sum(raw_rows) / c;
  if (grad == nullptr) return cost;
  grad->setZero(n, dims);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j == i || d(i, j) == 0.0) continue;
      const double coef = 2.0 / c * (d(i, j) - delta(i, j)) / (delta(i, j) * d(i, j));
      for (Index k = 0; k < dims; ++k) (*grad)(i, k) += coef * (x(i, k) - x(j, k));
    }
  }
  return cost;
}

double tsne_kl(const Matrix& x, const Matrix& p, Matrix* grad) {
  const Index n = x.rows();
  const Index dims = x.cols();
  Matrix num(n, n);
  std::vector<double> z_rows(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double z = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) {
        num(i, j) = 0.0;
        continue;
      }
      num(i, j) = 1.0 / (1.0 + detail::row_sq_distance(x, i, j));
      z += num(i, j);
    }
    z_rows[static_cast<std::size_t>(i)] = z;
  }
  const double z = ordered_sum(z_rows);
  std::vector<double> kl_rows(static_cast<std::size_t>(n), 0.0);
  if (grad != nullptr) grad->setZero(n, dims);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double kl = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double q = num(i, j) / z;
      if (p(i, j) > 0.0) kl += p(i, j) * std::log(p(i, j) / std::max(q, std::numeric_limits<double>::min()));
      if (grad != nullptr) {
        const double coef = 4.0 * (p(i, j) - q) * num(i, j);
        for (Index k = 0; k < dims; ++k) (*grad)(i, k) += coef * (x(i, k) - x(j, k));
      }
    }
    kl_rows[static_cast<std::size_t>(i)] = kl;
  }
  return ordered_sum(kl_rows);
}

Conditionals tsne_conditionals(const Matrix& delta, double perplexity) {
  const Index n = delta.rows();
  Conditionals out{Matrix::Zero(n, n), Vector::Zero(n), false};
  std::vector<unsigned char> ok(static_cast<std::size_t>(n), 1);
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < n; ++i) {
    double beta = 0.0;
    ok[static_cast<std::size_t>(i)] = detail::calibrate_row(delta, perplexity, i, out.p, beta) ? 1 : 0;
    out.beta(i) = beta;
  }
  for (unsigned char v : ok) {
    if (!v) out.unconverged = true;
  }
  return out;
}

}  // namespace omp

Matrix distances(const Matrix& x, Exec exec) {
  return exec == Exec::reference ? reference::distances(x) : omp::distances(x);
}

double stress_fixed(const Matrix& x, const Matrix& dhat, Matrix* grad, Exec exec) {
  return exec == Exec::reference ? reference::stress_fixed(x, dhat, grad) : omp::stress_fixed(x, dhat, grad);
}

double sammon(const Matrix& x, const Matrix& delta, Matrix* grad, Exec exec) {
  return exec == Exec::reference ? reference::sammon(x, delta, grad) : omp::sammon(x, delta, grad);
}

double tsne_kl(const Matrix& x, const Matrix& p, Matrix* grad, Exec exec) {
  return exec == Exec::reference ? reference::tsne_kl(x, p, grad) : omp::tsne_kl(x, p, grad);
}

Conditionals tsne_conditionals(const Matrix& delta, double perplexity, Exec exec) {
  return exec == Exec::reference ? reference::tsne_conditionals(delta, perplexity)
                                 : omp::tsne_conditionals(delta, perplexity);
}

}  // namespace dynmap::kernels
