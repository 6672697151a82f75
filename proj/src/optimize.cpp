#include "dynmap/optimize.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <limits>
#include <random>

#include "dynmap/core.hpp"
#include "dynmap/static_methods.hpp"

namespace dynmap {

void OptimizerSettings::validate() const {
  if (n_iter < 1) fail(ErrorKind::config, "n_iter must be at least 1");
  if (!(tol >= 0.0)) fail(ErrorKind::config, "tol must be nonnegative");
  if (!(step_size > 0.0)) fail(ErrorKind::config, "step_size must be positive");
  if (n_inits < 1) fail(ErrorKind::config, "n_inits must be at least 1");
  if (n_iter_check < 1) fail(ErrorKind::config, "n_iter_check must be at least 1");
  if (verbose < 0 || verbose > 2) fail(ErrorKind::config, "verbose must be 0, 1 or 2");
  if (max_halvings < 0) fail(ErrorKind::config, "max_halvings must be nonnegative");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail(ErrorKind::config, "momentum must lie in [0, 1)");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::plateau: return "plateau";
    case StopReason::line_search_failed: return "line_search_failed";
  }
  return "?";
}

ConfigurationSequence random_init(Index n, Index dims, std::size_t periods, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ConfigurationSequence out;
  out.coords.reserve(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    Matrix x(n, dims);
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < dims; ++k) x(i, k) = 1e-2 * normal(rng);
    }
    out.coords.push_back(std::move(x));
  }
  return out;
}

ConfigurationSequence cmds_init(const DissimilaritySequence& d, int dims, const InclusionMask* mask, bool first_only) {
  const std::size_t periods = d.periods_count();
  const Index n = d.objects();
  ConfigurationSequence out;
  for (std::size_t t = 0; t < periods; ++t) {
    if (first_only && t > 0) {
      out.coords.push_back(out.coords.front());
      continue;
    }
    Matrix x = Matrix::Zero(n, dims);
    std::vector<Index> members;
    for (Index i = 0; i < n; ++i) {
      if (is_included(mask, t, i)) members.push_back(i);
    }
    if (static_cast<Index>(members.size()) > dims) {
      const Matrix sub = gather_square(d.matrices[t], members);
      const Matrix coords = cmds(sub, dims).coords;
      for (std::size_t r = 0; r < members.size(); ++r) x.row(members[r]) = coords.row(static_cast<Index>(r));
    }
    out.coords.push_back(std::move(x));
  }
  return out;
}

namespace {

double rms(const std::vector<Matrix>& g) {
  double s = 0.0;
  double count = 0.0;
  for (const Matrix& m : g) {
    s += m.squaredNorm();
    count += static_cast<double>(m.size());
  }
  return count > 0.0 ? std::sqrt(s / count) : 0.0;
}

void check_finite(double cost, int iteration) {
  if (!std::isfinite(cost)) {
    fail(ErrorKind::divergence, "non-finite cost encountered at iteration " + std::to_string(iteration));
  }
}

struct Problem {
  const StaticCost& cost;
  const StaticCost* exaggerated;  // t-SNE early phase, may be null
  const FitSpec& spec;
  const ObjectWeights& weights;
  const InclusionMask* mask;
};

struct RunOutcome {
  ConfigurationSequence x;
  CostBreakdown cost;
  double grad_norm = 0.0;
  int iterations = 0;
  StopReason stop = StopReason::max_iterations;
  std::vector<TraceEntry> trace;
};

// Static cost of period t at a trial configuration; a collapsed map counts as no descent.
double trial_static(const Problem& pb, std::size_t t, const Matrix& x) {
  try {
    const double c = pb.cost.evaluate(t, x, nullptr);
    return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate) throw;
    return std::numeric_limits<double>::infinity();
  }
}

double temporal_pass_for(const ConfigurationSequence& x, const Problem& pb, std::vector<Matrix>* grad) {
  if (grad != nullptr) *grad = temporal_gradient(x, pb.spec.p, pb.weights, pb.mask);
  return temporal_cost(x, pb.spec.p, pb.weights, pb.mask);
}

double block_rms(const Matrix& g) { return g.size() > 0 ? std::sqrt(g.squaredNorm() / static_cast<double>(g.size())) : 0.0; }

// Static costs and gradients of every period, evaluated concurrently.
void static_pass(const Problem& pb, const ConfigurationSequence& x, std::vector<double>& costs,
                 std::vector<Matrix>& grads) {
  const std::size_t periods = x.periods_count();
  costs.assign(periods, 0.0);
  grads.assign(periods, Matrix());
  std::vector<std::exception_ptr> errors(periods);
  const long long count = static_cast<long long>(periods);
#pragma omp parallel for schedule(dynamic) if (count > 1)
  for (long long t = 0; t < count; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    try {
      costs[ut] = pb.cost.evaluate(ut, x.coords[ut], &grads[ut]);
    } catch (...) {
      errors[ut] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Block-wise descent: each sweep visits the periods in order and runs a
// halving line search on X_t alone against the part of the total cost that
// depends on X_t. Every accepted block step lowers the total cost.
RunOutcome run_backtracking(const Problem& pb, ConfigurationSequence x, const OptimizerSettings& s) {
  RunOutcome out;
  const std::size_t periods = x.periods_count();
  const bool coupled = periods >= 2 && pb.spec.alpha != 0.0;
  const double alpha = pb.spec.alpha;
  std::vector<double> static_costs;
  std::vector<Matrix> static_grads;
  std::vector<Matrix> grad(periods);

  auto refresh = [&](int it) {
    static_pass(pb, x, static_costs, static_grads);
    CostBreakdown c;
    c.static_costs = static_costs;
    for (double v : static_costs) c.total += v;
    if (periods >= 2) {
      std::vector<Matrix> tgrad;
      c.temporal = temporal_pass_for(x, pb, coupled ? &tgrad : nullptr);
      c.total += alpha * c.temporal;
      for (std::size_t t = 0; t < periods; ++t) grad[t] = coupled ? Matrix(static_grads[t] + alpha * tgrad[t]) : static_grads[t];
    } else {
      grad[0] = static_grads[0];
    }
    check_finite(c.total, it);
    return c;
  };

  CostBreakdown current = refresh(0);
  double last_check = current.total;
  bool stopped = false;
  Matrix block_grad;
  Matrix temporal_grad;
  Matrix trial;
  Matrix best;

  for (int it = 1; it <= s.n_iter; ++it) {
    const double g = rms(grad);
    if (!s.fixed_iterations && g <= s.tol) {
      out.stop = StopReason::converged;
      out.iterations = it;
      stopped = true;
      break;
    }
    if (it % s.n_iter_check == 0) out.trace.push_back({it, current.total, g});

    bool any_accepted = false;
    for (std::size_t t = 0; t < periods; ++t) {
      double local = 0.0;
      if (coupled) {
        local = temporal_local(x, t, pb.spec.p, pb.weights, pb.mask, &temporal_grad);
        block_grad = static_grads[t] + alpha * temporal_grad;
      } else {
        block_grad = static_grads[t];
      }
      if (!s.fixed_iterations && block_rms(block_grad) <= s.tol) continue;

      const Matrix origin = x.coords[t];
      const double base = static_costs[t] + alpha * local;
      double accepted_cost = base;
      double accepted_static = static_costs[t];
      bool accepted = false;
      // Halve until the block cost drops, then keep halving while it keeps dropping.
      double step = s.step_size;
      for (int h = 0; h <= s.max_halvings; ++h) {
        trial = origin - step * block_grad;
        const double sc = trial_static(pb, t, trial);
        double c = sc;
        if (coupled && std::isfinite(sc)) {
          x.coords[t] = trial;
          c += alpha * temporal_local(x, t, pb.spec.p, pb.weights, pb.mask, nullptr);
        }
        if (c < accepted_cost) {
          accepted = true;
          accepted_cost = c;
          accepted_static = sc;
          best = trial;
        } else if (accepted) {
          break;
        }
        step *= 0.5;
      }
      if (accepted) {
        x.coords[t] = best;
        static_costs[t] = accepted_static;
        any_accepted = true;
      } else {
        x.coords[t] = origin;
      }
    }

    if (!any_accepted && !s.fixed_iterations) {
      out.stop = StopReason::line_search_failed;
      out.iterations = it;
      stopped = true;
      break;
    }
    current = refresh(it);
    if (!s.fixed_iterations && it % s.n_iter_check == 0) {
      if (last_check - current.total < s.min_cost_decrease) {
        out.stop = StopReason::plateau;
        out.iterations = it;
        stopped = true;
        break;
      }
      last_check = current.total;
    }
  }
  if (!stopped) {
    out.stop = StopReason::max_iterations;
    out.iterations = s.n_iter;
  }
  out.grad_norm = rms(grad);
  out.cost = current;
  out.x = std::move(x);
  return out;
}

RunOutcome run_momentum(const Problem& pb, ConfigurationSequence x, const OptimizerSettings& s) {
  constexpr int kExaggerationIters = 100;
  const double learning_rate = s.step_size * 200.0;
  RunOutcome out;
  std::vector<Matrix> grad;
  std::vector<Matrix> update;
  std::vector<Matrix> gains;
  for (const Matrix& m : x.coords) {
    update.push_back(Matrix::Zero(m.rows(), m.cols()));
    gains.push_back(Matrix::Ones(m.rows(), m.cols()));
  }
  double last_check = std::numeric_limits<double>::infinity();
  bool stopped = false;
  CostBreakdown current;

  for (int it = 1; it <= s.n_iter; ++it) {
    const bool early = pb.exaggerated != nullptr && it <= kExaggerationIters;
    current = total_cost_and_gradient(x, early ? *pb.exaggerated : pb.cost, pb.spec, pb.weights, pb.mask, grad);
    check_finite(current.total, it);
    const double g = rms(grad);
    if (!s.fixed_iterations && !early && g <= s.tol) {
      out.stop = StopReason::converged;
      out.iterations = it;
      stopped = true;
      break;
    }
    if (it % s.n_iter_check == 0) {
      out.trace.push_back({it, current.total, g});
      if (!s.fixed_iterations && !early) {
        if (last_check - current.total < s.min_cost_decrease) {
          out.stop = StopReason::plateau;
          out.iterations = it;
          stopped = true;
          break;
        }
        last_check = current.total;
      }
    }
    for (std::size_t t = 0; t < x.coords.size(); ++t) {
      Matrix& gain = gains[t];
      Matrix& up = update[t];
      const Matrix& gr = grad[t];
      for (Index i = 0; i < gain.rows(); ++i) {
        for (Index k = 0; k < gain.cols(); ++k) {
          // Gradient still pointing the way the last update came from: speed up.
          const bool consistent = gr(i, k) * up(i, k) < 0.0;
          gain(i, k) = std::max(consistent ? gain(i, k) * 1.2 : gain(i, k) * 0.8, 0.01);
        }
      }
      up = s.momentum * up - learning_rate * gain.cwiseProduct(gr);
      x.coords[t] += up;
    }
  }
  if (!stopped) out.iterations = s.n_iter;
  // Report the cost and gradient at the returned coordinates.
  current = total_cost_and_gradient(x, pb.cost, pb.spec, pb.weights, pb.mask, grad);
  check_finite(current.total, out.iterations);
  if (!stopped) out.stop = StopReason::max_iterations;
  out.grad_norm = rms(grad);
  out.cost = current;
  out.x = std::move(x);
  return out;
}

void check_init(const ConfigurationSequence& init, Index n, int dims, std::size_t periods) {
  if (init.periods_count() != periods) fail(ErrorKind::config, "init has the wrong number of periods");
  for (const Matrix& m : init.coords) {
    if (m.rows() != n || m.cols() != dims) {
      fail(ErrorKind::config, "init configurations must be " + std::to_string(n) + "x" + std::to_string(dims));
    }
    if (!m.allFinite()) fail(ErrorKind::config, "init has non-finite coordinates");
  }
}

}  // namespace

FitResult fit(const DissimilaritySequence& d, const FitSpec& spec, const OptimizerSettings& settings,
              const InclusionMask* mask) {
  d.validate();
  settings.validate();
  const std::size_t periods = d.periods_count();
  const Index n = d.objects();
  spec.validate(periods);
  if (mask != nullptr) mask->validate(periods, n);
  if (settings.init) check_init(*settings.init, n, spec.dims, periods);

  ObjectWeights weights;
  if (periods >= 2) {
    weights = compute_object_weights(d, mask);
  } else {
    weights.w = Vector::Ones(n);
    weights.z = Vector::Zero(n);
  }
  const auto cost = make_static_cost(d, spec, mask);
  std::unique_ptr<StaticCost> exaggerated;
  if (spec.method == Method::tsne && spec.method_params.early_exaggeration) {
    exaggerated = make_static_cost(d, spec, mask, 4.0);
  }
  const Problem pb{*cost, exaggerated.get(), spec, weights, mask};

  const int runs = settings.init ? 1 : settings.n_inits;
  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));
#pragma omp parallel for schedule(dynamic) if (runs > 1)
  for (int k = 0; k < runs; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    try {
      ConfigurationSequence start = settings.init
                                        ? *settings.init
                                        : random_init(n, spec.dims, periods, settings.seed + static_cast<std::uint64_t>(k));
      outcomes[uk] = spec.method == Method::tsne ? run_momentum(pb, std::move(start), settings)
                                                 : run_backtracking(pb, std::move(start), settings);
    } catch (...) {
      errors[uk] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < outcomes.size(); ++k) {
    if (outcomes[k].cost.total < outcomes[best].cost.total) best = k;
  }
  RunOutcome& chosen = outcomes[best];

  FitResult result;
  result.method = spec.method;
  result.coords = std::move(chosen.x);
  result.cost_total_final = chosen.cost.total;
  result.static_costs = chosen.cost.static_costs;
  double sum = 0.0;
  for (double c : result.static_costs) sum += c;
  result.cost_static_avg = sum / static_cast<double>(periods);
  result.grad_norm_final = chosen.grad_norm;
  result.converged = chosen.grad_norm <= settings.tol;
  result.iterations_used = chosen.iterations;
  result.init_index_selected = static_cast<int>(best);
  result.stop = chosen.stop;
  result.trace = std::move(chosen.trace);

  if (settings.verbose > 0) {
    std::ostream& log = settings.log != nullptr ? *settings.log : std::cerr;
    for (const std::string& line : describe_progress(result, settings.verbose)) log << line << '\n';
  }
  return result;
}

namespace {

std::string method_tag(Method m) {
  switch (m) {
    case Method::mds: return "[MDS]";
    case Method::sammon: return "[Sammon]";
    case Method::tsne: return "[TSNE]";
  }
  return "[?]";
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::vector<std::string> describe_progress(const FitResult& result, int verbose) {
  std::vector<std::string> lines;
  if (verbose <= 0) return lines;
  const std::string tag = method_tag(result.method);
  lines.push_back(tag + (result.method == Method::tsne ? " Running Gradient Descent with Momentum"
                                                       : " Running Gradient Descent with Backtracking via Halving"));
  if (verbose >= 2) {
    for (const TraceEntry& e : result.trace) {
      lines.push_back(tag + " Iteration " + std::to_string(e.iteration) + " -- Cost: " + fixed4(e.cost) +
                      " -- Gradient Norm: " + fixed4(e.grad_norm));
    }
  }
  std::string reason;
  switch (result.stop) {
    case StopReason::converged: reason = "gradient norm vanished"; break;
    case StopReason::max_iterations: reason = "maximum number of iterations reached"; break;
    case StopReason::plateau: reason = "cost improvement below threshold"; break;
    case StopReason::line_search_failed: reason = "no descent step found"; break;
  }
  lines.push_back(tag + " Iteration " + std::to_string(result.iterations_used) + ": " + reason +
                  ". Final cost: " + fixed4(result.cost_total_final));
  return lines;
}

}  // namespace dynmap
