#include "dynmap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>

namespace dynmap {

namespace {

void require_periods(const ConfigurationSequence& x, std::size_t min_t, const char* what) {
  x.validate();
  if (x.periods_count() < min_t) {
    fail(ErrorKind::temporal_data,
         std::string(what) + " requires at least " + std::to_string(min_t) + " periods");
  }
}

// Indices of the k smallest entries of row i (excluding i), ties by index.
std::vector<Index> nearest(const Matrix& dist, Index i, int k) {
  std::vector<Index> idx;
  for (Index j = 0; j < dist.cols(); ++j) {
    if (j != i) idx.push_back(j);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return dist(i, a) < dist(i, b); });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Matrix map_distances(const Matrix& x) {
  const Index n = x.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).norm();
  }
  return d;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void check_mask(const InclusionMask* mask, const ConfigurationSequence& x) {
  if (mask != nullptr) mask->validate(x.periods_count(), x.objects());
}

}  // namespace

MisalignAggregate parse_misalign_aggregate(const std::string& s) {
  if (s == "mean") return MisalignAggregate::mean;
  if (s == "total") return MisalignAggregate::total;
  fail(ErrorKind::config, "unknown misalignment aggregate '" + s + "'");
}

PersistenceMode parse_persistence_mode(const std::string& s) {
  if (s == "pooled") return PersistenceMode::pooled;
  if (s == "per_object") return PersistenceMode::per_object;
  fail(ErrorKind::config, "unknown persistence mode '" + s + "'");
}

double misalign_score(const ConfigurationSequence& x, const InclusionMask* mask, MisalignAggregate agg) {
  require_periods(x, 2, "misalignment");
  check_mask(mask, x);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 1; t < x.periods_count(); ++t) {
    for (Index i = 0; i < x.objects(); ++i) {
      if (!is_included(mask, t, i) || !is_included(mask, t - 1, i)) continue;
      total += (x.coords[t].row(i) - x.coords[t - 1].row(i)).norm();
      ++count;
    }
  }
  if (count == 0) fail(ErrorKind::temporal_data, "misalignment: no object is present in two consecutive periods");
  return agg == MisalignAggregate::mean ? total / static_cast<double>(count) : total;
}

double align_score(const ConfigurationSequence& x, const InclusionMask* mask) {
  require_periods(x, 2, "alignment");
  check_mask(mask, x);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 1; t < x.periods_count(); ++t) {
    for (Index i = 0; i < x.objects(); ++i) {
      if (!is_included(mask, t, i) || !is_included(mask, t - 1, i)) continue;
      const double a = x.coords[t - 1].row(i).norm();
      const double b = x.coords[t].row(i).norm();
      if (a == 0.0 || b == 0.0) continue;
      total += std::clamp(x.coords[t - 1].row(i).dot(x.coords[t].row(i)) / (a * b), -1.0, 1.0);
      ++count;
    }
  }
  if (count == 0) fail(ErrorKind::degenerate, "alignment: every position vector is zero");
  return total / static_cast<double>(count);
}

double hitrate_score(const Matrix& x, const Matrix& delta, int k) {
  const Index n = x.rows();
  if (delta.rows() != n || delta.cols() != n) fail(ErrorKind::config, "hit-rate: map and data sizes differ");
  if (k < 1 || k > n - 1) fail(ErrorKind::hyperparameter, "hit-rate: K must lie in [1, n-1]");
  const Matrix dm = map_distances(x);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const std::vector<Index> a = nearest(delta, i, k);
    const std::vector<Index> b = nearest(dm, i, k);
    std::vector<Index> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    total += static_cast<double>(common.size()) / k;
  }
  return total / static_cast<double>(n);
}

double adjusted_hitrate_score(const Matrix& x, const Matrix& delta, int k) {
  const Index n = x.rows();
  if (k < 1 || k > n - 1) fail(ErrorKind::hyperparameter, "hit-rate: K must lie in [1, n-1]");
  if (k == n - 1) fail(ErrorKind::hyperparameter, "adjusted hit-rate: K = n-1 leaves no room above chance");
  const double c = static_cast<double>(k) / static_cast<double>(n - 1);
  const double hr = hitrate_score(x, delta, k);
  return std::clamp((hr - c) / (1.0 - c), 0.0, 1.0);
}

std::vector<double> hitrates(const ConfigurationSequence& x, const DissimilaritySequence& d, int k,
                             const InclusionMask* mask, bool adjusted) {
  x.validate();
  check_mask(mask, x);
  if (x.periods_count() != d.periods_count() || x.objects() != d.objects()) {
    fail(ErrorKind::config, "hit-rate: coordinates and dissimilarities disagree in shape");
  }
  std::vector<double> out;
  for (std::size_t t = 0; t < x.periods_count(); ++t) {
    std::vector<Index> rows;
    for (Index i = 0; i < x.objects(); ++i) {
      if (is_included(mask, t, i)) rows.push_back(i);
    }
    const Index nt = static_cast<Index>(rows.size());
    if (nt < 2) continue;
    const Matrix xs = gather_rows(x.coords[t], rows);
    const Matrix ds = gather_square(d.matrices[t], rows);
    const int kt = static_cast<int>(std::min<Index>(k, nt - 1));
    if (adjusted) {
      if (kt >= nt - 1) continue;
      out.push_back(adjusted_hitrate_score(xs, ds, kt));
    } else {
      out.push_back(hitrate_score(xs, ds, kt));
    }
  }
  return out;
}

double avg_hitrate_score(const ConfigurationSequence& x, const DissimilaritySequence& d, int k,
                         const InclusionMask* mask) {
  const std::vector<double> h = hitrates(x, d, k, mask, false);
  if (h.empty()) fail(ErrorKind::data, "hit-rate: no period has two included objects");
  return std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
}

double avg_adjusted_hitrate_score(const ConfigurationSequence& x, const DissimilaritySequence& d, int k,
                                  const InclusionMask* mask) {
  const std::vector<double> h = hitrates(x, d, k, mask, true);
  if (h.empty()) fail(ErrorKind::hyperparameter, "adjusted hit-rate: undefined for every period (K = n-1)");
  return std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
}

double persistence_score(const ConfigurationSequence& x, const InclusionMask* mask, PersistenceMode mode) {
  require_periods(x, 3, "persistence");
  check_mask(mask, x);
  const Index n = x.objects();
  const Index dims = x.dims();
  std::vector<double> pooled_a;
  std::vector<double> pooled_b;
  double sum = 0.0;
  std::size_t used = 0;
  for (Index i = 0; i < n; ++i) {
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t t = 2; t < x.periods_count(); ++t) {
      if (!is_included(mask, t, i) || !is_included(mask, t - 1, i) || !is_included(mask, t - 2, i)) continue;
      for (Index c = 0; c < dims; ++c) {
        a.push_back(x.coords[t - 1](i, c) - x.coords[t - 2](i, c));
        b.push_back(x.coords[t](i, c) - x.coords[t - 1](i, c));
      }
    }
    if (mode == PersistenceMode::pooled) {
      pooled_a.insert(pooled_a.end(), a.begin(), a.end());
      pooled_b.insert(pooled_b.end(), b.begin(), b.end());
    } else if (a.size() >= 2) {
      const double r = pearson(a, b);
      if (std::isfinite(r)) {
        sum += r;
        ++used;
      }
    }
  }
  if (mode == PersistenceMode::per_object) {
    if (used == 0) fail(ErrorKind::degenerate, "persistence: no object has varying movement");
    return sum / static_cast<double>(used);
  }
  if (pooled_a.size() < 2) fail(ErrorKind::temporal_data, "persistence: no object spans three consecutive periods");
  const double r = pearson(pooled_a, pooled_b);
  if (!std::isfinite(r)) fail(ErrorKind::degenerate, "persistence: movement vectors have zero variance");
  return r;
}

int default_k(Index n) { return static_cast<int>(std::min<Index>(5, n - 1)); }

double EvalReport::at(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) fail(ErrorKind::config, "metric '" + name + "' was not computed");
  return it->second;
}

EvalReport evaluate(const ConfigurationSequence& x, const DissimilaritySequence& d, const EvalOptions& options,
                    const InclusionMask* mask, const std::vector<double>* static_costs) {
  EvalReport r;
  const int k = options.k > 0 ? options.k : default_k(x.objects());
  auto attempt = [&](const std::string& name, auto&& f) {
    try {
      r.values[name] = f();
    } catch (const Error&) {
      r.skipped.push_back(name);
    }
  };
  attempt("misalign", [&] { return misalign_score(x, mask, options.misalign); });
  attempt("alignment", [&] { return align_score(x, mask); });
  attempt("persistence", [&] { return persistence_score(x, mask, options.persistence); });
  r.hitrate = hitrates(x, d, k, mask, false);
  if (!r.hitrate.empty()) {
    r.values["avg_hitrate"] = std::accumulate(r.hitrate.begin(), r.hitrate.end(), 0.0) / r.hitrate.size();
  } else {
    r.skipped.push_back("avg_hitrate");
  }
  r.adjusted_hitrate = hitrates(x, d, k, mask, true);
  if (!r.adjusted_hitrate.empty()) {
    r.values["avg_adjusted_hitrate"] =
        std::accumulate(r.adjusted_hitrate.begin(), r.adjusted_hitrate.end(), 0.0) / r.adjusted_hitrate.size();
  } else {
    r.skipped.push_back("avg_adjusted_hitrate");
  }
  if (static_costs != nullptr && !static_costs->empty()) {
    r.values["cost_static_avg"] =
        std::accumulate(static_costs->begin(), static_costs->end(), 0.0) / static_costs->size();
  }
  return r;
}

}  // namespace dynmap
