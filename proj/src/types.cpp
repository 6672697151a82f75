#include "dynmap/types.hpp"

#include <cmath>
#include <sstream>

namespace dynmap {

namespace {
constexpr double kSymmetryTol = 1e-9;
}

void DissimilaritySequence::validate() const {
  if (matrices.empty()) fail(ErrorKind::data, "dissimilarity sequence has no periods");
  const Index n = matrices.front().rows();
  if (n < 2) fail(ErrorKind::data, "dissimilarity matrices need at least two objects");
  if (static_cast<Index>(labels.size()) != n) fail(ErrorKind::data, "label count does not match matrix size");
  if (periods.size() != matrices.size()) fail(ErrorKind::data, "period label count does not match sequence length");
  for (std::size_t t = 0; t < matrices.size(); ++t) {
    const Matrix& m = matrices[t];
    if (m.rows() != n || m.cols() != n) {
      std::ostringstream os;
      os << "matrix for period " << periods[t] << " is " << m.rows() << "x" << m.cols() << ", expected " << n << "x" << n;
      fail(ErrorKind::data, os.str());
    }
    for (Index i = 0; i < n; ++i) {
      if (std::abs(m(i, i)) > kSymmetryTol) fail(ErrorKind::data, "nonzero diagonal in period " + periods[t]);
      for (Index j = 0; j < n; ++j) {
        const double v = m(i, j);
        if (!std::isfinite(v)) fail(ErrorKind::data, "non-finite dissimilarity in period " + periods[t]);
        if (v < 0.0) fail(ErrorKind::data, "negative dissimilarity in period " + periods[t]);
        if (std::abs(v - m(j, i)) > kSymmetryTol) {
          fail(ErrorKind::data, "asymmetric dissimilarity (" + labels[i] + ", " + labels[j] + ") in period " + periods[t]);
        }
      }
    }
  }
}

DissimilaritySequence make_sequence(std::vector<Matrix> matrices) {
  DissimilaritySequence seq;
  const Index n = matrices.empty() ? 0 : matrices.front().rows();
  for (Index i = 0; i < n; ++i) seq.labels.push_back(std::to_string(i));
  for (std::size_t t = 0; t < matrices.size(); ++t) seq.periods.push_back(std::to_string(t + 1));
  seq.matrices = std::move(matrices);
  return seq;
}

void ConfigurationSequence::validate() const {
  if (coords.empty()) fail(ErrorKind::config, "configuration sequence is empty");
  const Index n = coords.front().rows();
  const Index d = coords.front().cols();
  if (d < 1) fail(ErrorKind::config, "configurations need at least one dimension");
  for (const Matrix& x : coords) {
    if (x.rows() != n || x.cols() != d) fail(ErrorKind::config, "configurations differ in shape across periods");
    if (!x.allFinite()) fail(ErrorKind::config, "configuration has non-finite coordinates");
  }
}

InclusionMask InclusionMask::all(std::size_t periods, Index n) {
  InclusionMask m;
  m.included.assign(periods, std::vector<unsigned char>(static_cast<std::size_t>(n), 1));
  return m;
}

std::vector<Index> InclusionMask::members(std::size_t t) const {
  std::vector<Index> out;
  const auto& row = included[t];
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i]) out.push_back(static_cast<Index>(i));
  }
  return out;
}

void InclusionMask::validate(std::size_t periods, Index n) const {
  if (included.size() != periods) fail(ErrorKind::config, "inclusion mask period count does not match data");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& row : included) {
    if (static_cast<Index>(row.size()) != n) fail(ErrorKind::config, "inclusion mask width does not match object count");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] > 1) fail(ErrorKind::config, "inclusion mask values must be 0 or 1");
      if (row[i]) seen[i] = true;
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) fail(ErrorKind::config, "object " + std::to_string(i) + " is never included");
  }
}

void FitSpec::validate(std::size_t periods) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail(ErrorKind::hyperparameter, "alpha must be a finite nonnegative number");
  if (p < 1) fail(ErrorKind::hyperparameter, "p must be a positive integer");
  if (dims < 1) fail(ErrorKind::hyperparameter, "output dimensionality must be positive");
  if (periods >= 2 && static_cast<std::size_t>(p) >= periods) {
    fail(ErrorKind::hyperparameter,
         "p = " + std::to_string(p) + " requires more than " + std::to_string(p) + " periods, got " + std::to_string(periods));
  }
  if (method == Method::tsne && !(method_params.perplexity > 0.0)) {
    fail(ErrorKind::hyperparameter, "perplexity must be positive");
  }
}

std::string to_string(Method m) {
  switch (m) {
    case Method::mds: return "mds";
    case Method::sammon: return "sammon";
    case Method::tsne: return "tsne";
  }
  return "?";
}

std::string to_string(MdsType t) {
  switch (t) {
    case MdsType::ratio: return "ratio";
    case MdsType::interval: return "interval";
    case MdsType::ordinal: return "ordinal";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "mds") return Method::mds;
  if (s == "sammon") return Method::sammon;
  if (s == "tsne") return Method::tsne;
  fail(ErrorKind::config, "unknown method '" + s + "'");
}

MdsType parse_mds_type(const std::string& s) {
  if (s == "ratio") return MdsType::ratio;
  if (s == "interval") return MdsType::interval;
  if (s == "ordinal") return MdsType::ordinal;
  fail(ErrorKind::config, "unknown mds type '" + s + "'");
}

Matrix gather_rows(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = x.row(rows[r]);
  return out;
}

Matrix gather_square(const Matrix& m, const std::vector<Index>& rows) {
  const Index k = static_cast<Index>(rows.size());
  Matrix out(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) out(a, b) = m(rows[a], rows[b]);
  }
  return out;
}

}  // namespace dynmap
