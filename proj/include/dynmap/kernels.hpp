#pragma once

// Pairwise cost kernels shared by the static mapping methods.
//
// Each kernel exists twice: a straightforward pair-loop reference in
// `reference::` and a row-parallel OpenMP version in `omp::`. The OpenMP
// versions accumulate every row in a fixed order, so their results do not
// depend on the thread count. The reference versions are kept for tests and
// the benchmark binary.

#include "dynmap/types.hpp"

namespace dynmap::kernels {

enum class Exec { reference, parallel };

/// Perplexity calibration output for one matrix.
struct Conditionals {
  Matrix p;              // row-stochastic conditional probabilities P(j|i)
  Vector beta;           // Gaussian precision per row
  bool unconverged = false;
};

namespace reference {
Matrix distances(const Matrix& x);
double stress_fixed(const Matrix& x, const Matrix& dhat, Matrix* grad);
double sammon(const Matrix& x, const Matrix& delta, Matrix* grad);
double tsne_kl(const Matrix& x, const Matrix& p, Matrix* grad);
Conditionals tsne_conditionals(const Matrix& delta, double perplexity);
}  // namespace reference

namespace omp {
Matrix distances(const Matrix& x);
double stress_fixed(const Matrix& x, const Matrix& dhat, Matrix* grad);
double sammon(const Matrix& x, const Matrix& delta, Matrix* grad);
double tsne_kl(const Matrix& x, const Matrix& p, Matrix* grad);
Conditionals tsne_conditionals(const Matrix& delta, double perplexity);
}  // namespace omp

/// Euclidean distance matrix of the rows of `x`.
Matrix distances(const Matrix& x, Exec exec = Exec::parallel);

/// Normalized stress sqrt(sum (d - dhat)^2 / sum d^2) over i < j, with
/// `dhat` held fixed. Writes the gradient into `grad` when non-null.
/// Throws Error(degenerate) when every map distance is zero.
double stress_fixed(const Matrix& x, const Matrix& dhat, Matrix* grad, Exec exec = Exec::parallel);

/// Sammon stress; `delta` must be positive off the diagonal.
double sammon(const Matrix& x, const Matrix& delta, Matrix* grad, Exec exec = Exec::parallel);

/// KL(P || Q) with Student-t map affinities Q.
double tsne_kl(const Matrix& x, const Matrix& p, Matrix* grad, Exec exec = Exec::parallel);

/// Per-row bisection on the Gaussian precision so each conditional
/// distribution has entropy log(perplexity). At most 50 steps, tolerance 1e-5.
Conditionals tsne_conditionals(const Matrix& delta, double perplexity, Exec exec = Exec::parallel);

}  // namespace dynmap::kernels
