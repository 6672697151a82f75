#pragma once

#include <cmath>
#include <limits>

#include "dynmap/types.hpp"

namespace dynmap::kernels::detail {

inline double sq(double v) { return v * v; }

inline double row_distance(const Matrix& x, Index i, Index j) {
  double s = 0.0;
  for (Index k = 0; k < x.cols(); ++k) s += sq(x(i, k) - x(j, k));
  return std::sqrt(s);
}

inline double row_sq_distance(const Matrix& x, Index i, Index j) {
  double s = 0.0;
  for (Index k = 0; k < x.cols(); ++k) s += sq(x(i, k) - x(j, k));
  return s;
}

// Bisection for one row of the perplexity calibration. Writes P(j|i) into
// row i of `p` and returns whether the entropy target was met.
inline bool calibrate_row(const Matrix& delta, double perplexity, Index i, Matrix& p, double& beta_out) {
  const Index n = delta.rows();
  const double target = std::log(perplexity);
  double min_sq = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j) {
    if (j != i) min_sq = std::min(min_sq, sq(delta(i, j)));
  }
  double beta = 1.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int iter = 0; iter < 50; ++iter) {
    double sum = 0.0;
    double weighted = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) {
        p(i, j) = 0.0;
        continue;
      }
      const double shifted = sq(delta(i, j)) - min_sq;
      const double v = std::exp(-beta * shifted);
      p(i, j) = v;
      sum += v;
      weighted += v * shifted;
    }
    const double entropy = std::log(sum) + beta * weighted / sum;
    for (Index j = 0; j < n; ++j) p(i, j) /= sum;
    const double diff = entropy - target;
    if (std::abs(diff) < 1e-5) {
      converged = true;
      break;
    }
    if (diff > 0.0) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
    } else {
      hi = beta;
      beta = 0.5 * (beta + lo);
    }
  }
  beta_out = beta;
  return converged;
}

}  // namespace dynmap::kernels::detail
