#pragma once

#include "dynmap/kernels.hpp"
#include "dynmap/types.hpp"

namespace dynmap {

// --- classical scaling -----------------------------------------------------

struct CmdsResult {
  Matrix coords;          // n x d
  Vector eigenvalues;     // all n eigenvalues of B, descending
  bool zero_padded = false;  // fewer than d positive eigenvalues
};

/// Torgerson scaling: double-centre -1/2 J (D*D) J, keep the top-d
/// eigenvectors scaled by sqrt(max(lambda, 0)). Each eigenvector's
/// largest-magnitude entry is made positive.
CmdsResult cmds(const Matrix& delta, int dims);

// --- isotonic regression -----------------------------------------------------

/// Weighted least-squares projection of `y` onto nondecreasing sequences
/// (pool adjacent violators).
Vector pava(const Vector& y, const Vector& weights);
Vector pava(const Vector& y);

// --- MDS ---------------------------------------------------------------------

/// Disparity transform fitted to the current map distances `dist`:
/// ratio b*delta (b >= 0 by least squares), interval a + b*delta (b >= 0,
/// clamped at zero), ordinal PAVA of the distances in delta order (ties by
/// current distance). No rescaling.
Matrix fit_disparities_raw(const Matrix& dist, const Matrix& delta, MdsType type);

/// Raw disparities rescaled so that sum_{i<j} dhat^2 = sum_{i<j} delta^2.
/// The fixed scale keeps the stress from being invariant to shrinking the
/// map; for ratio MDS the result is delta itself.
Matrix fit_disparities(const Matrix& dist, const Matrix& delta, MdsType type);

struct StressResult {
  double stress;
  Matrix disparities;
};

StressResult mds_stress(const Matrix& x, const Matrix& delta, MdsType type,
                        kernels::Exec exec = kernels::Exec::parallel);
/// Gradient of the stress with the disparities refreshed at `x` and then held fixed.
Matrix mds_gradient(const Matrix& x, const Matrix& delta, MdsType type,
                    kernels::Exec exec = kernels::Exec::parallel);

// --- Sammon ------------------------------------------------------------------

double sammon_cost(const Matrix& x, const Matrix& delta);
Matrix sammon_gradient(const Matrix& x, const Matrix& delta);
/// Throws Error(domain) when an off-diagonal dissimilarity is not positive.
void require_positive_offdiag(const Matrix& delta);

// --- t-SNE -------------------------------------------------------------------

struct TsneAffinities {
  Matrix p;
  bool unconverged = false;  // some row's bandwidth search hit the iteration cap
};

/// Symmetrized joint probabilities (P(j|i) + P(i|j)) / 2n with Gaussian
/// kernels on squared dissimilarities; off-diagonal entries clamped >= 1e-12.
TsneAffinities tsne_p_matrix(const Matrix& delta, double perplexity,
                             kernels::Exec exec = kernels::Exec::parallel);
double tsne_cost(const Matrix& x, const Matrix& p);
Matrix tsne_gradient(const Matrix& x, const Matrix& p);

}  // namespace dynmap
