#include "dynmap/gp.hpp"

#include <cmath>
#include <iterator>
#include <limits>

namespace dynmap {

namespace {

constexpr double kSqrt5 = 2.23606797749978969641;
constexpr double kPi = 3.14159265358979323846;
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

std::vector<double> length_grid() {
  std::vector<double> g;
  for (int k = 0; k < 9; ++k) g.push_back(std::pow(10.0, -1.5 + 0.25 * k));  // 0.03 .. 3.2
  return g;
}

}  // namespace

double GaussianProcess::matern52(double r) {
  const double s = kSqrt5 * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

Matrix GaussianProcess::kernel(const Matrix& a, const Matrix& b, const Vector& length) const {
  Matrix k(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      const double r = ((a.row(i) - b.row(j)).transpose().array() / length.array()).matrix().norm();
      k(i, j) = matern52(r);
    }
  }
  return k;
}

bool GaussianProcess::try_factor(const Vector& length, double jitter, double* nll) {
  Matrix k = kernel(x_, x_, length);
  k.diagonal().array() += jitter;
  llt_.compute(k);
  if (llt_.info() != Eigen::Success) return false;
  const Matrix& l = llt_.matrixL();
  for (Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0)) return false;
  }
  alpha_ = llt_.solve(ys_);
  const double m = static_cast<double>(ys_.size());
  const double quad = std::max(ys_.dot(alpha_), 1e-300);
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  signal_ = quad / m;
  if (nll != nullptr) *nll = 0.5 * (m * std::log(signal_) + logdet);
  return std::isfinite(signal_);
}

void GaussianProcess::fit(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size() || x.rows() == 0) fail(ErrorKind::config, "surrogate: input sizes differ");
  x_ = x;
  y_mean_ = y.mean();
  const double var = (y.array() - y_mean_).square().mean();
  y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
  ys_ = (y.array() - y_mean_) / y_scale_;

  const Index dims = x.cols();
  const std::vector<double> grid = length_grid();
  const std::size_t g = grid.size();
  std::size_t combos = 1;
  for (Index k = 0; k < dims; ++k) combos *= g;

  for (double jitter = 1e-6; jitter <= 1e-2 * (1 + 1e-9); jitter *= 10.0) {
    double best = std::numeric_limits<double>::infinity();
    Vector best_len;
    Vector len(dims);
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t code = c;
      for (Index k = 0; k < dims; ++k) {
        len(k) = grid[code % g];
        code /= g;
      }
      double nll = 0.0;
      if (try_factor(len, jitter, &nll) && nll < best) {
        best = nll;
        best_len = len;
      }
    }
    if (best_len.size() == dims) {
      length_ = best_len;
      jitter_ = jitter;
      try_factor(length_, jitter_, nullptr);
      return;
    }
  }
  fail(ErrorKind::degenerate, "surrogate covariance is singular even with jitter 1e-2");
}

GaussianProcess::Prediction GaussianProcess::predict(const Eigen::RowVectorXd& x) const {
  const Matrix ks = kernel(x, x_, length_);  // 1 x m
  const double mean = (ks * alpha_)(0, 0);
  const Vector v = llt_.matrixL().solve(ks.transpose());
  const double var = std::max(0.0, signal_ * (1.0 - v.squaredNorm()));
  return {y_mean_ + y_scale_ * mean, y_scale_ * std::sqrt(var)};
}

double expected_improvement(double mean, double sd, double best) {
  const double diff = best - mean;
  if (!(sd > 0.0)) return std::max(diff, 0.0);
  const double z = diff / sd;
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
  return std::max(0.0, diff * cdf + sd * pdf);
}

Eigen::RowVectorXd halton_point(std::uint64_t index, Index dims, const Eigen::RowVectorXd& shift) {
  if (dims > static_cast<Index>(std::size(kPrimes))) fail(ErrorKind::config, "too many search dimensions");
  Eigen::RowVectorXd p(dims);
  for (Index k = 0; k < dims; ++k) {
    const int base = kPrimes[k];
    double f = 1.0;
    double r = 0.0;
    for (std::uint64_t i = index; i > 0; i /= static_cast<std::uint64_t>(base)) {
      f /= base;
      r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    }
    r += shift.size() > k ? shift(k) : 0.0;
    p(k) = r - std::floor(r);
  }
  return p;
}

}  // namespace dynmap
