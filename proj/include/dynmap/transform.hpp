#pragma once

#include "dynmap/types.hpp"

namespace dynmap {

/// x -> scale * x * rotation + translation (row-vector convention).
struct ProcrustesTransform {
  Matrix rotation;   // d x d orthogonal; determinant -1 for reflections
  double scale = 1.0;
  Eigen::RowVectorXd translation;

  Matrix apply(const Matrix& x) const;
};

/// Least-squares similarity transform taking `source` onto `target`.
/// Throws Error(domain) when either configuration has no spread.
ProcrustesTransform procrustes_fit(const Matrix& source, const Matrix& target, bool allow_scaling);

enum class AlignMode { per_map, fixed };

AlignMode parse_align_mode(const std::string& s);

/// per_map aligns every period to `reference` on its own; fixed fits one
/// transform from period 1 and applies it to all periods.
ConfigurationSequence align_maps(const ConfigurationSequence& x, const Matrix& reference, AlignMode mode,
                                 bool allow_scaling = false);

/// Residual sum of squares after centring both shapes, scaling them to unit
/// Frobenius norm and rotating/reflecting/scaling one onto the other. In [0, 1].
double procrustes_distance(const Matrix& a, const Matrix& b);

}  // namespace dynmap
