#include "dynmap/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <utility>

namespace dynmap {

namespace {

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) fail(ErrorKind::data, std::string(what) + ": matrix is not square");
}

}  // namespace

std::vector<std::string> sort_periods(std::vector<std::string> periods) {
  std::vector<double> values(periods.size());
  bool numeric = true;
  for (std::size_t k = 0; k < periods.size() && numeric; ++k) numeric = parse_number(periods[k], values[k]);
  if (!numeric) {
    std::sort(periods.begin(), periods.end());
    return periods;
  }
  std::vector<std::size_t> order(periods.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::string> out;
  out.reserve(periods.size());
  for (std::size_t k : order) out.push_back(periods[k]);
  return out;
}

PeriodMatrices edgelist_to_matrices(const std::vector<EdgeRow>& rows) {
  if (rows.empty()) fail(ErrorKind::data, "edgelist is empty");

  struct PeriodData {
    std::set<std::string> ids;
    std::map<std::pair<std::string, std::string>, double> scores;
  };
  std::map<std::string, PeriodData> by_period;
  for (const EdgeRow& r : rows) {
    if (r.period.empty()) fail(ErrorKind::data, "edgelist row with empty period");
    if (!std::isfinite(r.score)) {
      fail(ErrorKind::data, "non-finite score for pair (" + r.id_i + ", " + r.id_j + ") in period " + r.period);
    }
    PeriodData& pd = by_period[r.period];
    pd.ids.insert(r.id_i);
    pd.ids.insert(r.id_j);
    if (r.id_i == r.id_j) continue;
    auto key = std::minmax(r.id_i, r.id_j);
    auto [it, inserted] = pd.scores.emplace(std::make_pair(key.first, key.second), r.score);
    if (!inserted && it->second != r.score) {
      fail(ErrorKind::data, "conflicting scores for pair (" + key.first + ", " + key.second + ") in period " +
                                r.period);
    }
  }

  std::vector<std::string> periods;
  for (const auto& kv : by_period) periods.push_back(kv.first);
  periods = sort_periods(std::move(periods));

  PeriodMatrices out;
  for (const std::string& period : periods) {
    const PeriodData& pd = by_period.at(period);
    if (pd.ids.size() < 2) fail(ErrorKind::data, "period " + period + " has fewer than two objects");
    std::vector<std::string> labels(pd.ids.begin(), pd.ids.end());
    std::map<std::string, Index> index;
    for (std::size_t k = 0; k < labels.size(); ++k) index[labels[k]] = static_cast<Index>(k);
    const Index n = static_cast<Index>(labels.size());
    Matrix m = Matrix::Zero(n, n);
    for (const auto& [pair, score] : pd.scores) {
      const Index i = index.at(pair.first);
      const Index j = index.at(pair.second);
      m(i, j) = score;
      m(j, i) = score;
    }
    out.periods.push_back(period);
    out.matrices.push_back(std::move(m));
    out.labels.push_back(std::move(labels));
  }
  return out;
}

SimTransform parse_sim_transform(const std::string& s) {
  if (s == "mirror") return SimTransform::mirror;
  if (s == "max_minus") return SimTransform::max_minus;
  if (s == "reciprocal") return SimTransform::reciprocal;
  fail(ErrorKind::config, "unknown similarity transformation '" + s + "'");
}

Matrix sim_to_diss(const Matrix& s, SimTransform transform) {
  require_square(s, "sim_to_diss");
  const Index n = s.rows();
  double max_s = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!std::isfinite(s(i, j))) fail(ErrorKind::data, "similarity matrix has non-finite entries");
      max_s = std::max(max_s, s(i, j));
    }
  }
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = s(i, j);
      switch (transform) {
        case SimTransform::mirror:
          if (v < 0.0 || v > 1.0) fail(ErrorKind::domain, "mirror transformation requires similarities in [0, 1]");
          d(i, j) = 1.0 - v;
          break;
        case SimTransform::max_minus:
          d(i, j) = max_s - v;
          break;
        case SimTransform::reciprocal:
          if (v <= 0.0) fail(ErrorKind::domain, "reciprocal transformation requires positive similarities");
          d(i, j) = 1.0 / v;
          break;
      }
    }
  }
  return d;
}

PeriodMatrices sim_to_diss(const PeriodMatrices& s, SimTransform transform) {
  PeriodMatrices out = s;
  for (Matrix& m : out.matrices) m = sim_to_diss(m, transform);
  return out;
}

Matrix coocc_to_sim(const Matrix& counts) {
  require_square(counts, "coocc_to_sim");
  const Index n = counts.rows();
  for (Index i = 0; i < n; ++i) {
    if (!(counts(i, i) > 0.0)) fail(ErrorKind::domain, "co-occurrence matrix has a zero diagonal entry");
  }
  Matrix s(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      s(i, j) = i == j ? 1.0 : counts(i, j) / std::sqrt(counts(i, i) * counts(j, j));
    }
  }
  return s;
}

TableMetric parse_table_metric(const std::string& s) {
  if (s == "euclidean") return TableMetric::euclidean;
  if (s == "cityblock") return TableMetric::cityblock;
  if (s == "cosine_distance") return TableMetric::cosine_distance;
  fail(ErrorKind::config, "unknown table metric '" + s + "'");
}

DissimilaritySequence table_to_diss(const std::vector<Matrix>& tables, TableMetric metric) {
  if (tables.empty()) fail(ErrorKind::data, "no tables given");
  const Index n = tables.front().rows();
  const Index k = tables.front().cols();
  std::vector<Matrix> out;
  for (const Matrix& z : tables) {
    if (z.rows() != n || z.cols() != k) fail(ErrorKind::data, "tables differ in shape");
    if (!z.allFinite()) fail(ErrorKind::data, "table has non-finite entries");
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        double v = 0.0;
        switch (metric) {
          case TableMetric::euclidean:
            v = (z.row(i) - z.row(j)).norm();
            break;
          case TableMetric::cityblock:
            v = (z.row(i) - z.row(j)).lpNorm<1>();
            break;
          case TableMetric::cosine_distance: {
            const double ni = z.row(i).norm();
            const double nj = z.row(j).norm();
            if (ni == 0.0 || nj == 0.0) fail(ErrorKind::domain, "cosine distance of a zero row");
            v = std::max(0.0, 1.0 - z.row(i).dot(z.row(j)) / (ni * nj));
            break;
          }
        }
        d(i, j) = v;
        d(j, i) = v;
      }
    }
    out.push_back(std::move(d));
  }
  return make_sequence(std::move(out));
}

ExpandedSequence expand_matrices(const PeriodMatrices& s) {
  if (s.matrices.empty()) fail(ErrorKind::data, "no periods to expand");
  if (s.labels.size() != s.matrices.size() || s.periods.size() != s.matrices.size()) {
    fail(ErrorKind::data, "period, label and matrix counts differ");
  }
  std::set<std::string> roster;
  for (std::size_t t = 0; t < s.matrices.size(); ++t) {
    require_square(s.matrices[t], "expand_matrices");
    if (static_cast<std::size_t>(s.matrices[t].rows()) != s.labels[t].size()) {
      fail(ErrorKind::data, "label count does not match matrix size in period " + s.periods[t]);
    }
    std::set<std::string> seen;
    for (const std::string& l : s.labels[t]) {
      if (!seen.insert(l).second) fail(ErrorKind::data, "duplicate label '" + l + "' in period " + s.periods[t]);
      roster.insert(l);
    }
  }
  std::vector<std::string> labels(roster.begin(), roster.end());
  std::map<std::string, Index> index;
  for (std::size_t k = 0; k < labels.size(); ++k) index[labels[k]] = static_cast<Index>(k);
  const Index n = static_cast<Index>(labels.size());

  ExpandedSequence out;
  out.sequence.labels = labels;
  out.sequence.periods = s.periods;
  out.mask.included.assign(s.matrices.size(), std::vector<unsigned char>(static_cast<std::size_t>(n), 0));
  for (std::size_t t = 0; t < s.matrices.size(); ++t) {
    Matrix m = Matrix::Zero(n, n);
    std::vector<Index> g(s.labels[t].size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      g[k] = index.at(s.labels[t][k]);
      out.mask.included[t][static_cast<std::size_t>(g[k])] = 1;
    }
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = 0; b < g.size(); ++b) {
        m(g[a], g[b]) = s.matrices[t](static_cast<Index>(a), static_cast<Index>(b));
      }
    }
    out.sequence.matrices.push_back(std::move(m));
  }
  return out;
}

DissimilaritySequence to_sequence(const PeriodMatrices& s) {
  ExpandedSequence e = expand_matrices(s);
  for (const auto& row : e.mask.included) {
    for (unsigned char v : row) {
      if (v == 0) fail(ErrorKind::data, "rosters differ across periods; use the unbalanced mode");
    }
  }
  return std::move(e.sequence);
}

NormalizeMode parse_normalize_mode(const std::string& s) {
  if (s == "max1") return NormalizeMode::max1;
  if (s == "zscore_offdiag") return NormalizeMode::zscore_offdiag;
  fail(ErrorKind::config, "unknown normalization '" + s + "'");
}

DissimilaritySequence normalize_diss(const DissimilaritySequence& d, NormalizeMode mode) {
  d.validate();
  DissimilaritySequence out = d;
  const Index n = d.objects();
  if (mode == NormalizeMode::max1) {
    double mx = 0.0;
    for (const Matrix& m : d.matrices) mx = std::max(mx, m.maxCoeff());
    if (mx <= 0.0) fail(ErrorKind::domain, "cannot normalize an all-zero dissimilarity sequence");
    for (Matrix& m : out.matrices) m /= mx;
    return out;
  }

  double sum = 0.0;
  double count = 0.0;
  for (const Matrix& m : d.matrices) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        sum += m(i, j);
        count += 1.0;
      }
    }
  }
  const double mean = sum / count;
  double ss = 0.0;
  for (const Matrix& m : d.matrices) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) ss += (m(i, j) - mean) * (m(i, j) - mean);
    }
  }
  const double sd = std::sqrt(ss / count);
  if (sd <= 0.0) fail(ErrorKind::domain, "off-diagonal dissimilarities have zero variance");
  double lo = std::numeric_limits<double>::infinity();
  for (const Matrix& m : d.matrices) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) lo = std::min(lo, (m(i, j) - mean) / sd);
    }
  }
  for (Matrix& m : out.matrices) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) m(i, j) = i == j ? 0.0 : (m(i, j) - mean) / sd - lo;
    }
  }
  return out;
}

}  // namespace dynmap
