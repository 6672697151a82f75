#include <cmath>

#include "dynmap/kernels.hpp"
#include "kernels_detail.hpp"

namespace dynmap::kernels::reference {

using detail::row_distance;
using detail::sq;

Matrix distances(const Matrix& x) {
  const Index n = x.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = row_distance(x, i, j);
  }
  return d;
}

double stress_fixed(const Matrix& x, const Matrix& dhat, Matrix* grad) {
  const Index n = x.rows();
  const Matrix d = distances(x);
  double num = 0.0;
  double den = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      num += sq(d(i, j) - dhat(i, j));
      den += sq(d(i, j));
    }
  }
  if (den <= 0.0) fail(ErrorKind::degenerate, "all map distances are zero");
  const double stress = std::sqrt(num / den);
  if (grad == nullptr) return stress;
  grad->setZero(n, x.cols());
  if (stress == 0.0) return stress;
  // d stress / d x_i = (dnum_i * den - num * dden_i) / (2 stress den^2)
  const double scale = 1.0 / (2.0 * stress * den * den);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (d(i, j) == 0.0) continue;
      const double coef = scale * (2.0 * (d(i, j) - dhat(i, j)) / d(i, j) * den - 2.0 * num);
      for (Index k = 0; k < x.cols(); ++k) {
        const double g = coef * (x(i, k) - x(j, k));
        (*grad)(i, k) += g;
        (*grad)(j, k) -= g;
      }
    }
  }
  return stress;
}

double sammon(const Matrix& x, const Matrix& delta, Matrix* grad) {
  const Index n = x.rows();
  const Matrix d = distances(x);
  double c = 0.0;
  double raw = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      c += delta(i, j);
      raw += sq(d(i, j) - delta(i, j)) / delta(i, j);
    }
  }
  const double cost = raw / c;
  if (grad == nullptr) return cost;
  grad->setZero(n, x.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (d(i, j) == 0.0) continue;
      const double coef = 2.0 / c * (d(i, j) - delta(i, j)) / (delta(i, j) * d(i, j));
      for (Index k = 0; k < x.cols(); ++k) {
        const double g = coef * (x(i, k) - x(j, k));
        (*grad)(i, k) += g;
        (*grad)(j, k) -= g;
      }
    }
  }
  return cost;
}

double tsne_kl(const Matrix& x, const Matrix& p, Matrix* grad) {
  const Index n = x.rows();
  Matrix num = Matrix::Zero(n, n);
  double z = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      num(i, j) = num(j, i) = 1.0 / (1.0 + detail::row_sq_distance(x, i, j));
      z += 2.0 * num(i, j);
    }
  }
  double kl = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j || p(i, j) <= 0.0) continue;
      const double q = std::max(num(i, j) / z, std::numeric_limits<double>::min());
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  }
  if (grad == nullptr) return kl;
  grad->setZero(n, x.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double coef = 4.0 * (p(i, j) - num(i, j) / z) * num(i, j);
      for (Index k = 0; k < x.cols(); ++k) {
        const double g = coef * (x(i, k) - x(j, k));
        (*grad)(i, k) += g;
        (*grad)(j, k) -= g;
      }
    }
  }
  return kl;
}

Conditionals tsne_conditionals(const Matrix& delta, double perplexity) {
  const Index n = delta.rows();
  Conditionals out{Matrix::Zero(n, n), Vector::Zero(n), false};
  for (Index i = 0; i < n; ++i) {
    double beta = 0.0;
    if (!detail::calibrate_row(delta, perplexity, i, out.p, beta)) out.unconverged = true;
    out.beta(i) = beta;
  }
  return out;
}

}  // namespace dynmap::kernels::reference
