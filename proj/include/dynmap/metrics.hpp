#pragma once

#include <map>
#include <string>
#include <vector>

#include "dynmap/types.hpp"

namespace dynmap {

enum class MisalignAggregate { mean, total };
enum class PersistenceMode { pooled, per_object };

MisalignAggregate parse_misalign_aggregate(const std::string& s);
PersistenceMode parse_persistence_mode(const std::string& s);

/// Path length between consecutive periods, averaged (or summed) over every
/// object transition where the object is present at both ends.
double misalign_score(const ConfigurationSequence& x, const InclusionMask* mask = nullptr,
                      MisalignAggregate agg = MisalignAggregate::mean);

/// Mean cosine similarity between an object's position vectors in
/// consecutive periods. Zero vectors are skipped.
double align_score(const ConfigurationSequence& x, const InclusionMask* mask = nullptr);

/// Mean fraction of K nearest neighbours shared by the data and the map.
/// Ties in either distance are broken by the lower index.
double hitrate_score(const Matrix& x, const Matrix& delta, int k);
/// (HR - c) / (1 - c) with c = K / (n - 1), clamped to [0, 1].
double adjusted_hitrate_score(const Matrix& x, const Matrix& delta, int k);

/// Per-period hit-rates over included objects. Periods whose included
/// roster is too small for K are computed with K reduced to n_t - 1.
std::vector<double> hitrates(const ConfigurationSequence& x, const DissimilaritySequence& d, int k,
                             const InclusionMask* mask = nullptr, bool adjusted = false);
double avg_hitrate_score(const ConfigurationSequence& x, const DissimilaritySequence& d, int k,
                         const InclusionMask* mask = nullptr);
double avg_adjusted_hitrate_score(const ConfigurationSequence& x, const DissimilaritySequence& d, int k,
                                  const InclusionMask* mask = nullptr);

/// Pearson correlation of consecutive movement vectors. Pooled mode stacks
/// every component of every pair; per_object averages per-object correlations
/// (objects with zero variance are skipped).
double persistence_score(const ConfigurationSequence& x, const InclusionMask* mask = nullptr,
                         PersistenceMode mode = PersistenceMode::pooled);

/// min(5, n - 1).
int default_k(Index n);

struct EvalOptions {
  int k = 0;  // 0 selects default_k
  MisalignAggregate misalign = MisalignAggregate::mean;
  PersistenceMode persistence = PersistenceMode::pooled;
};

/// Named metric values. Metrics that are undefined for the input (for
/// example persistence with T < 3) are omitted and listed in `skipped`.
struct EvalReport {
  std::map<std::string, double> values;
  std::vector<double> hitrate;
  std::vector<double> adjusted_hitrate;
  std::vector<std::string> skipped;

  double at(const std::string& name) const;
};

EvalReport evaluate(const ConfigurationSequence& x, const DissimilaritySequence& d, const EvalOptions& options,
                    const InclusionMask* mask = nullptr, const std::vector<double>* static_costs = nullptr);

}  // namespace dynmap
