#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dynmap/error.hpp"

namespace dynmap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Ordered sequence of square dissimilarity matrices over a fixed roster.
struct DissimilaritySequence {
  std::vector<Matrix> matrices;
  std::vector<std::string> labels;
  std::vector<std::string> periods;

  std::size_t periods_count() const { return matrices.size(); }
  Index objects() const { return matrices.empty() ? 0 : matrices.front().rows(); }

  /// Throws Error(data) when a matrix is asymmetric, has a nonzero diagonal,
  /// negative or non-finite entries, or when shapes/label counts disagree.
  void validate() const;
};

/// Fills default labels ("0", "1", ...) and periods ("1", "2", ...).
DissimilaritySequence make_sequence(std::vector<Matrix> matrices);

/// One n x d coordinate matrix per period.
struct ConfigurationSequence {
  std::vector<Matrix> coords;

  std::size_t periods_count() const { return coords.size(); }
  Index objects() const { return coords.empty() ? 0 : coords.front().rows(); }
  Index dims() const { return coords.empty() ? 0 : coords.front().cols(); }

  void validate() const;
};

/// Per-period presence flags for unbalanced rosters; included[t][i] is 1 when
/// object i is observed in period t.
struct InclusionMask {
  std::vector<std::vector<unsigned char>> included;

  static InclusionMask all(std::size_t periods, Index n);

  bool contains(std::size_t t, Index i) const { return included[t][static_cast<std::size_t>(i)] != 0; }
  std::vector<Index> members(std::size_t t) const;
  void validate(std::size_t periods, Index n) const;
};

/// Null-safe presence check for an optional mask.
inline bool is_included(const InclusionMask* mask, std::size_t t, Index i) {
  return mask == nullptr || mask->contains(t, i);
}

/// Temporal-penalty weights w_i = exp(-b z_i).
struct ObjectWeights {
  Vector w;
  Vector z;
  double b = 0.0;
};

enum class Method { mds, sammon, tsne };
enum class MdsType { ratio, interval, ordinal };

struct StaticMethodSpec {
  MdsType mds_type = MdsType::ratio;
  double perplexity = 30.0;
  /// t-SNE only: multiply P by 4 for the first 100 iterations.
  bool early_exaggeration = false;
};

struct FitSpec {
  Method method = Method::mds;
  double alpha = 0.0;
  int p = 1;
  int dims = 2;
  StaticMethodSpec method_params;

  void validate(std::size_t periods) const;
};

std::string to_string(Method m);
std::string to_string(MdsType t);
Method parse_method(const std::string& s);
MdsType parse_mds_type(const std::string& s);

/// Rows of `x` listed in `rows`.
Matrix gather_rows(const Matrix& x, const std::vector<Index>& rows);
/// Submatrix of a square matrix restricted to `rows` x `rows`.
Matrix gather_square(const Matrix& m, const std::vector<Index>& rows);

}  // namespace dynmap
