#include "dynmap/tune.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include "dynmap/gp.hpp"

namespace dynmap {

namespace {

double metric_value(const std::string& name, const ConfigurationSequence& x, const TuneContext& ctx) {
  const InclusionMask* mask = ctx.mask ? &*ctx.mask : nullptr;
  const int k = ctx.eval.k > 0 ? ctx.eval.k : default_k(x.objects());
  if (name == "misalign") return misalign_score(x, mask, ctx.eval.misalign);
  if (name == "alignment_inverted") return 1.0 - align_score(x, mask);
  if (name == "persistence_inverted") return 1.0 - persistence_score(x, mask, ctx.eval.persistence);
  if (name == "hitrate_inverted") return 1.0 - avg_hitrate_score(x, ctx.data, k, mask);
  if (name == "adjusted_hitrate_inverted") return 1.0 - avg_adjusted_hitrate_score(x, ctx.data, k, mask);
  fail(ErrorKind::config, "unknown evaluation metric '" + name + "'");
}

void select_best(TuneResult& r) {
  double best = std::numeric_limits<double>::infinity();
  r.best_row.reset();
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const TuneRow& row = r.rows[k];
    if (row.error.empty() && row.combined_loss && *row.combined_loss < best) {
      best = *row.combined_loss;
      r.best_row = k;
    }
  }
}

void attach_loss(TuneRow& row, const std::vector<std::string>& metric_names, const std::vector<double>& weights) {
  if (!row.error.empty() || weights.empty()) return;
  std::vector<double> values;
  for (const std::string& m : metric_names) values.push_back(row.metrics.at(m));
  row.combined_loss = combined_loss(row.cost_static_avg, values, weights);
}

void require_all_failed_check(const TuneResult& r) {
  for (const TuneRow& row : r.rows) {
    if (row.error.empty()) return;
  }
  fail(ErrorKind::divergence, "every evaluation failed; first error: " + r.rows.front().error);
}

double clamp_round(const ParamRange& p, double v) {
  v = std::clamp(v, p.lo, p.hi);
  return p.integer ? std::round(v) : v;
}

}  // namespace

bool is_tunable(const std::string& name) { return name == "alpha" || name == "p" || name == "perplexity"; }

FitSpec apply_params(const FitSpec& spec, const std::map<std::string, double>& params) {
  FitSpec out = spec;
  for (const auto& [name, value] : params) {
    if (name == "alpha") {
      out.alpha = value;
    } else if (name == "p") {
      out.p = static_cast<int>(std::lround(value));
    } else if (name == "perplexity") {
      out.method_params.perplexity = value;
    } else {
      fail(ErrorKind::config, "parameter '" + name + "' cannot be tuned");
    }
  }
  return out;
}

TuneRow evaluate_params(const TuneContext& ctx, const std::map<std::string, double>& params) {
  TuneRow row;
  row.params = params;
  try {
    const FitSpec spec = apply_params(ctx.spec, params);
    OptimizerSettings settings = ctx.settings;
    settings.verbose = 0;
    const FitResult fr = fit(ctx.data, spec, settings, ctx.mask ? &*ctx.mask : nullptr);
    row.cost_static_avg = fr.cost_static_avg;
    for (const std::string& m : ctx.metrics) row.metrics[m] = metric_value(m, fr.coords, ctx);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    row.error = e.what();
  }
  return row;
}

double combined_loss(double static_avg, const std::vector<double>& metric_values, const std::vector<double>& weights) {
  if (weights.size() != metric_values.size() + 1) {
    fail(ErrorKind::config, "combined loss needs one weight for the static cost plus one per metric");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) fail(ErrorKind::config, "combined loss weights must be nonnegative");
  }
  double s = weights[0] * static_avg;
  for (std::size_t k = 0; k < metric_values.size(); ++k) s += weights[k + 1] * metric_values[k];
  return s;
}

TuneResult grid_search(const TuneContext& ctx, const std::vector<GridAxis>& grid, const std::vector<double>& weights) {
  if (grid.empty()) fail(ErrorKind::config, "grid search needs at least one parameter");
  TuneResult result;
  result.metric_names = ctx.metrics;
  std::size_t cells = 1;
  for (const GridAxis& a : grid) {
    if (!is_tunable(a.name)) fail(ErrorKind::config, "parameter '" + a.name + "' cannot be tuned");
    if (a.values.empty()) fail(ErrorKind::config, "grid axis '" + a.name + "' is empty");
    result.param_names.push_back(a.name);
    cells *= a.values.size();
  }
  if (!weights.empty() && weights.size() != ctx.metrics.size() + 1) {
    fail(ErrorKind::config, "combined loss needs one weight for the static cost plus one per metric");
  }

  std::vector<std::map<std::string, double>> points(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t code = c;
    for (std::size_t a = grid.size(); a-- > 0;) {
      points[c][grid[a].name] = grid[a].values[code % grid[a].values.size()];
      code /= grid[a].values.size();
    }
  }

  result.rows.resize(cells);
  std::vector<std::exception_ptr> errors(cells);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < cells; ++c) {
    try {
      result.rows[c] = evaluate_params(ctx, points[c]);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  require_all_failed_check(result);
  for (TuneRow& row : result.rows) attach_loss(row, result.metric_names, weights);
  select_best(result);
  return result;
}

BayesTrace bayesian_minimize(const SearchSpace& space, const Objective& objective, const BayesSettings& settings) {
  if (space.empty()) fail(ErrorKind::config, "search space is empty");
  for (const ParamRange& p : space) {
    if (!(p.lo <= p.hi)) fail(ErrorKind::config, "search range for '" + p.name + "' has lo > hi");
  }
  if (settings.n_initial_points < 1) fail(ErrorKind::config, "n_initial_points must be at least 1");
  if (settings.n_calls < settings.n_initial_points) fail(ErrorKind::config, "n_calls must be >= n_initial_points");
  if (settings.candidates < 1) fail(ErrorKind::config, "candidate count must be positive");

  const Index dims = static_cast<Index>(space.size());
  std::mt19937_64 rng(settings.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto to_space = [&](const Eigen::RowVectorXd& u) {
    std::vector<double> v(space.size());
    for (std::size_t k = 0; k < space.size(); ++k) {
      v[k] = clamp_round(space[k], space[k].lo + u(static_cast<Index>(k)) * (space[k].hi - space[k].lo));
    }
    return v;
  };
  auto to_unit = [&](const std::vector<double>& v) {
    Eigen::RowVectorXd u(dims);
    for (std::size_t k = 0; k < space.size(); ++k) {
      const double w = space[k].hi - space[k].lo;
      u(static_cast<Index>(k)) = w > 0.0 ? (v[k] - space[k].lo) / w : 0.5;
    }
    return u;
  };

  BayesTrace trace;
  Matrix xs(0, dims);
  std::vector<double> ys;
  auto record = [&](const std::vector<double>& point) {
    const double y = objective(point);
    if (!std::isfinite(y)) fail(ErrorKind::divergence, "objective returned a non-finite value");
    trace.points.push_back(point);
    trace.values.push_back(y);
    xs.conservativeResize(xs.rows() + 1, dims);
    xs.row(xs.rows() - 1) = to_unit(point);
    ys.push_back(y);
  };

  Eigen::RowVectorXd shift(dims);
  for (Index k = 0; k < dims; ++k) shift(k) = unif(rng);
  for (int k = 0; k < settings.n_initial_points; ++k) {
    record(to_space(halton_point(static_cast<std::uint64_t>(k + 1), dims, shift)));
  }

  GaussianProcess gp;
  for (int call = settings.n_initial_points; call < settings.n_calls; ++call) {
    gp.fit(xs, Eigen::Map<const Vector>(ys.data(), static_cast<Index>(ys.size())));
    const double best = *std::min_element(ys.begin(), ys.end());
    double best_ei = -1.0;
    std::vector<double> choice;
    for (int c = 0; c < settings.candidates; ++c) {
      Eigen::RowVectorXd u(dims);
      for (Index k = 0; k < dims; ++k) u(k) = unif(rng);
      const std::vector<double> point = to_space(u);
      const GaussianProcess::Prediction pr = gp.predict(to_unit(point));
      const double ei = expected_improvement(pr.mean, pr.sd, best);
      if (ei > best_ei) {
        best_ei = ei;
        choice = point;
      }
    }
    record(choice);
  }

  trace.best = static_cast<std::size_t>(std::min_element(trace.values.begin(), trace.values.end()) -
                                        trace.values.begin());
  return trace;
}

TuneResult bayesian_search(const TuneContext& ctx, const SearchSpace& space, const std::vector<double>& weights,
                           const BayesSettings& settings) {
  if (weights.size() != ctx.metrics.size() + 1) {
    fail(ErrorKind::config, "combined loss needs one weight for the static cost plus one per metric");
  }
  TuneResult result;
  result.metric_names = ctx.metrics;
  for (const ParamRange& p : space) {
    if (!is_tunable(p.name)) fail(ErrorKind::config, "parameter '" + p.name + "' cannot be tuned");
    result.param_names.push_back(p.name);
  }
  double worst = 0.0;
  auto objective = [&](const std::vector<double>& v) {
    std::map<std::string, double> params;
    for (std::size_t k = 0; k < space.size(); ++k) params[space[k].name] = v[k];
    TuneRow row = evaluate_params(ctx, params);
    attach_loss(row, result.metric_names, weights);
    result.rows.push_back(row);
    if (!row.error.empty()) return worst > 0.0 ? 2.0 * worst : 1.0;
    worst = std::max(worst, std::abs(*row.combined_loss));
    return *row.combined_loss;
  };
  bayesian_minimize(space, objective, settings);
  require_all_failed_check(result);
  select_best(result);
  return result;
}

}  // namespace dynmap
