#include "dynmap/transform.hpp"

#include <algorithm>
#include <cmath>

namespace dynmap {

namespace {

Matrix centred(const Matrix& x, Eigen::RowVectorXd& mean) {
  mean = x.colwise().mean();
  return x.rowwise() - mean;
}

}  // namespace

Matrix ProcrustesTransform::apply(const Matrix& x) const {
  return ((scale * x * rotation).rowwise() + translation);
}

ProcrustesTransform procrustes_fit(const Matrix& source, const Matrix& target, bool allow_scaling) {
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    fail(ErrorKind::config, "procrustes: source and target shapes differ");
  }
  Eigen::RowVectorXd mean_s;
  Eigen::RowVectorXd mean_t;
  const Matrix a = centred(source, mean_s);
  const Matrix b = centred(target, mean_t);
  const double norm_a = a.squaredNorm();
  if (b.squaredNorm() <= 0.0) fail(ErrorKind::domain, "procrustes: target configuration has no spread");
  if (norm_a <= 0.0) fail(ErrorKind::domain, "procrustes: source configuration has no spread");

  Eigen::JacobiSVD<Matrix> svd(a.transpose() * b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesTransform tr;
  tr.rotation = svd.matrixU() * svd.matrixV().transpose();
  tr.scale = allow_scaling ? svd.singularValues().sum() / norm_a : 1.0;
  tr.translation = mean_t - tr.scale * mean_s * tr.rotation;
  return tr;
}

AlignMode parse_align_mode(const std::string& s) {
  if (s == "per_map") return AlignMode::per_map;
  if (s == "fixed") return AlignMode::fixed;
  fail(ErrorKind::config, "unknown alignment mode '" + s + "'");
}

ConfigurationSequence align_maps(const ConfigurationSequence& x, const Matrix& reference, AlignMode mode,
                                 bool allow_scaling) {
  x.validate();
  ConfigurationSequence out;
  out.coords.reserve(x.coords.size());
  if (mode == AlignMode::fixed) {
    const ProcrustesTransform tr = procrustes_fit(x.coords.front(), reference, allow_scaling);
    for (const Matrix& m : x.coords) out.coords.push_back(tr.apply(m));
  } else {
    for (const Matrix& m : x.coords) out.coords.push_back(procrustes_fit(m, reference, allow_scaling).apply(m));
  }
  return out;
}

double procrustes_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorKind::config, "procrustes: shapes differ");
  Eigen::RowVectorXd mean;
  Matrix x = centred(a, mean);
  Matrix y = centred(b, mean);
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx <= 0.0 || ny <= 0.0) fail(ErrorKind::domain, "procrustes: configuration has no spread");
  x /= nx;
  y /= ny;
  Eigen::JacobiSVD<Matrix> svd(x.transpose() * y);
  const double s = svd.singularValues().sum();
  return std::clamp(1.0 - s * s, 0.0, 1.0);
}

}  // namespace dynmap
