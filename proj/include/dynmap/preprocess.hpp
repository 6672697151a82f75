#pragma once

#include <string>
#include <vector>

#include "dynmap/types.hpp"

namespace dynmap {

struct EdgeRow {
  std::string period;
  std::string id_i;
  std::string id_j;
  double score = 0.0;
};

/// Per-period square matrices with per-period rosters. Used both for raw
/// similarities and for unbalanced dissimilarities before expansion.
struct PeriodMatrices {
  std::vector<std::string> periods;
  std::vector<Matrix> matrices;
  std::vector<std::vector<std::string>> labels;
};

/// Builds one symmetric matrix per period over the sorted ids seen in that
/// period. Periods sort numerically when every label parses as a number.
/// Equal duplicate pairs collapse; conflicting ones throw Error(data).
PeriodMatrices edgelist_to_matrices(const std::vector<EdgeRow>& rows);

/// Sort order used for period labels.
std::vector<std::string> sort_periods(std::vector<std::string> periods);

enum class SimTransform { mirror, max_minus, reciprocal };
SimTransform parse_sim_transform(const std::string& s);

/// mirror: 1 - s; max_minus: max(S) - s with the maximum over off-diagonal
/// entries of this matrix; reciprocal: 1/s. Diagonal forced to 0.
Matrix sim_to_diss(const Matrix& s, SimTransform transform);
PeriodMatrices sim_to_diss(const PeriodMatrices& s, SimTransform transform);

/// s_ij = c_ij / sqrt(c_ii c_jj), diagonal 1.
Matrix coocc_to_sim(const Matrix& counts);

enum class TableMetric { euclidean, cityblock, cosine_distance };
TableMetric parse_table_metric(const std::string& s);

DissimilaritySequence table_to_diss(const std::vector<Matrix>& tables, TableMetric metric);

struct ExpandedSequence {
  DissimilaritySequence sequence;
  InclusionMask mask;
};

/// Embeds every period into the sorted union roster with placeholder 0 for
/// absent objects.
ExpandedSequence expand_matrices(const PeriodMatrices& s);

/// Balanced input: every period must share the same roster.
DissimilaritySequence to_sequence(const PeriodMatrices& s);

enum class NormalizeMode { max1, zscore_offdiag };
NormalizeMode parse_normalize_mode(const std::string& s);

DissimilaritySequence normalize_diss(const DissimilaritySequence& d, NormalizeMode mode);

}  // namespace dynmap
