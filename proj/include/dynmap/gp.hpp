#pragma once

#include <cstdint>
#include <vector>

#include "dynmap/types.hpp"

namespace dynmap {

/// Noise-free Gaussian-process regression with a Matern-5/2 kernel.
/// Inputs are expected in the unit cube. Length scales are chosen per
/// dimension from a log-spaced grid by maximum profile likelihood; the
/// signal variance is profiled out in closed form.
class GaussianProcess {
 public:
  void fit(const Matrix& x, const Vector& y);

  struct Prediction {
    double mean;
    double sd;
  };
  Prediction predict(const Eigen::RowVectorXd& x) const;

  const Vector& length_scales() const { return length_; }
  double jitter() const { return jitter_; }

  static double matern52(double r);

 private:
  Matrix kernel(const Matrix& a, const Matrix& b, const Vector& length) const;
  bool try_factor(const Vector& length, double jitter, double* nll);

  Matrix x_;
  Vector length_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double signal_ = 1.0;
  double jitter_ = 1e-6;
  Eigen::LLT<Matrix> llt_;
  Vector alpha_;
  Vector ys_;
};

/// (f* - mu) Phi(z) + sd phi(z), z = (f* - mu) / sd; the positive part of
/// f* - mu when sd is zero.
double expected_improvement(double mean, double sd, double best);

/// Radical-inverse Halton point `index` (from 1) in `dims` dimensions,
/// shifted modulo 1 by `shift`.
Eigen::RowVectorXd halton_point(std::uint64_t index, Index dims, const Eigen::RowVectorXd& shift);

}  // namespace dynmap
