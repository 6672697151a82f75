#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynmap/metrics.hpp"
#include "dynmap/optimize.hpp"

namespace dynmap {

struct ParamRange {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  bool integer = false;
};

using SearchSpace = std::vector<ParamRange>;

/// Values for one named parameter in a Cartesian grid.
struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct TuneRow {
  std::map<std::string, double> params;
  std::map<std::string, double> metrics;  // minimization-aligned
  double cost_static_avg = 0.0;
  std::optional<double> combined_loss;
  std::string error;  // nonempty when the fit failed
};

struct TuneResult {
  std::vector<std::string> param_names;
  std::vector<std::string> metric_names;
  std::vector<TuneRow> rows;
  std::optional<std::size_t> best_row;
};

/// Everything shared by the evaluations of a search. `metrics` names the
/// evaluation functions: misalign, alignment_inverted, persistence_inverted,
/// hitrate_inverted, adjusted_hitrate_inverted. Inverted metrics are 1 - value.
struct TuneContext {
  DissimilaritySequence data;
  FitSpec spec;
  OptimizerSettings settings;
  std::optional<InclusionMask> mask;
  std::vector<std::string> metrics = {"misalign", "persistence_inverted"};
  EvalOptions eval;
};

/// Names accepted in grids and search spaces.
bool is_tunable(const std::string& name);
/// Copy of `spec` with alpha, p or perplexity overwritten.
FitSpec apply_params(const FitSpec& spec, const std::map<std::string, double>& params);

/// Fits once at `params` and records every requested metric.
TuneRow evaluate_params(const TuneContext& ctx, const std::map<std::string, double>& params);

/// weights[0] * static_avg + sum_k weights[k] * metrics[k-1].
double combined_loss(double static_avg, const std::vector<double>& metric_values, const std::vector<double>& weights);

/// Evaluates every Cartesian grid point. When `weights` is nonempty each row
/// receives a combined loss and the best row is set. Failed fits are kept as
/// error rows; throws when every fit fails.
TuneResult grid_search(const TuneContext& ctx, const std::vector<GridAxis>& grid,
                       const std::vector<double>& weights = {});

struct BayesSettings {
  int n_calls = 20;
  int n_initial_points = 3;
  std::uint64_t seed = 0;
  int candidates = 1024;
};

/// Minimizes a black-box objective on a box. Returns the evaluated points
/// (integer coordinates rounded) and their values in call order.
struct BayesTrace {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
  std::size_t best = 0;
};

using Objective = std::function<double(const std::vector<double>&)>;

BayesTrace bayesian_minimize(const SearchSpace& space, const Objective& objective, const BayesSettings& settings);

/// Bayesian search of the combined loss over `space`.
TuneResult bayesian_search(const TuneContext& ctx, const SearchSpace& space, const std::vector<double>& weights,
                           const BayesSettings& settings);

}  // namespace dynmap
