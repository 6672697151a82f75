#include "dynmap/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <random>

#include "dynmap/transform.hpp"

namespace dynmap {

void SimConfig::validate() const {
  if (n < 2) fail(ErrorKind::config, "simulation needs n >= 2");
  if (t < 2) fail(ErrorKind::config, "simulation needs t >= 2");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail(ErrorKind::config, "momentum must lie in [0, 1)");
  if (!(scale >= 0.0) || !(noise >= 0.0) || !(measurement_noise >= 0.0)) {
    fail(ErrorKind::config, "simulation scales must be nonnegative");
  }
}

ConfigurationSequence simulate_paths(const SimConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index n = cfg.n;
  Matrix x(n, 2);
  Matrix dx(n, 2);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < 2; ++k) x(i, k) = cfg.scale * normal(rng);
  }
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < 2; ++k) dx(i, k) = cfg.noise * normal(rng);
  }
  ConfigurationSequence out;
  out.coords.push_back(x);
  for (int t = 1; t < cfg.t; ++t) {
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < 2; ++k) dx(i, k) = cfg.momentum * dx(i, k) + (1.0 - cfg.momentum) * cfg.noise * normal(rng);
    }
    x += dx;
    out.coords.push_back(x);
  }
  return out;
}

DissimilaritySequence measure_distances(const ConfigurationSequence& truth, double measurement_noise,
                                        std::uint64_t seed) {
  truth.validate();
  if (!(measurement_noise >= 0.0)) fail(ErrorKind::config, "measurement noise must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> out;
  for (const Matrix& x : truth.coords) {
    Matrix y = x;
    if (measurement_noise > 0.0) {
      for (Index i = 0; i < y.rows(); ++i) {
        for (Index k = 0; k < y.cols(); ++k) y(i, k) += measurement_noise * normal(rng);
      }
    }
    const Index n = y.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (y.row(i) - y.row(j)).norm();
    }
    out.push_back(std::move(d));
  }
  return make_sequence(std::move(out));
}

double mean_procrustes_distance(const ConfigurationSequence& fitted, const ConfigurationSequence& truth) {
  if (fitted.periods_count() != truth.periods_count()) fail(ErrorKind::config, "period counts differ");
  double s = 0.0;
  for (std::size_t t = 0; t < truth.periods_count(); ++t) s += procrustes_distance(fitted.coords[t], truth.coords[t]);
  return s / static_cast<double>(truth.periods_count());
}

RecoveryOptions default_recovery_options() {
  RecoveryOptions o;
  o.spec.method = Method::mds;
  o.spec.method_params.mds_type = MdsType::ratio;
  o.spec.p = 1;
  o.settings.n_inits = 10;
  return o;
}

std::vector<RecoveryCell> recovery_study(const RecoveryOptions& options) {
  if (options.reps < 1) fail(ErrorKind::config, "recovery study needs reps >= 1");
  if (options.noise_levels.empty() || options.alpha_levels.empty()) {
    fail(ErrorKind::config, "recovery study needs noise and alpha levels");
  }
  options.base.validate();
  FitSpec spec = options.spec;
  spec.method = Method::mds;
  spec.method_params.mds_type = MdsType::ratio;
  spec.dims = 2;
  OptimizerSettings settings = options.settings;
  settings.verbose = 0;

  const std::size_t n_noise = options.noise_levels.size();
  const std::size_t n_alpha = options.alpha_levels.size();
  const std::size_t reps = static_cast<std::size_t>(options.reps);
  const std::size_t jobs = n_noise * reps * n_alpha;
  std::vector<double> stress(jobs, 0.0);
  std::vector<double> proc(jobs, 0.0);
  std::vector<char> ok(jobs, 0);
  std::vector<std::exception_ptr> errors(jobs);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t job = 0; job < jobs; ++job) {
    const std::size_t a = job % n_alpha;
    const std::size_t r = (job / n_alpha) % reps;
    const std::size_t nz = job / (n_alpha * reps);
    try {
      SimConfig cfg = options.base;
      cfg.seed = options.base.seed + r;
      cfg.measurement_noise = options.noise_levels[nz];
      const ConfigurationSequence truth = simulate_paths(cfg);
      const DissimilaritySequence d = measure_distances(truth, cfg.measurement_noise, cfg.seed + 1000003ULL);
      FitSpec s = spec;
      s.alpha = options.alpha_levels[a];
      const FitResult fr = fit(d, s, settings);
      stress[job] = fr.cost_static_avg;
      proc[job] = mean_procrustes_distance(fr.coords, truth);
      ok[job] = 1;
    } catch (const Error&) {
      ok[job] = 0;
    } catch (...) {
      errors[job] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<RecoveryCell> cells;
  for (std::size_t nz = 0; nz < n_noise; ++nz) {
    for (std::size_t a = 0; a < n_alpha; ++a) {
      RecoveryCell c;
      c.noise = options.noise_levels[nz];
      c.alpha = options.alpha_levels[a];
      double ss = 0.0;
      double sp = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const std::size_t job = (nz * reps + r) * n_alpha + a;
        if (ok[job]) {
          ss += stress[job];
          sp += proc[job];
          ++c.reps;
        } else {
          ++c.failures;
        }
      }
      c.stress = c.reps > 0 ? ss / c.reps : std::numeric_limits<double>::quiet_NaN();
      c.procrustes = c.reps > 0 ? sp / c.reps : std::numeric_limits<double>::quiet_NaN();
      cells.push_back(c);
    }
  }
  return cells;
}

namespace {

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<BenchCell> runtime_benchmark(const BenchOptions& options) {
  if (options.n_list.empty() || options.t_list.empty()) fail(ErrorKind::config, "benchmark grids must be nonempty");
  if (options.iterations < 1 || options.repeats < 1) fail(ErrorKind::config, "benchmark budget must be positive");

  OptimizerSettings settings;
  settings.n_iter = options.iterations;
  settings.tol = 0.0;
  settings.fixed_iterations = true;
  settings.seed = options.seed;
  FitSpec spec;
  spec.method = Method::mds;
  spec.method_params.mds_type = MdsType::ratio;
  spec.p = 1;

  std::vector<BenchCell> cells;
  for (int n : options.n_list) {
    for (int t : options.t_list) {
      SimConfig cfg;
      cfg.n = n;
      cfg.t = std::max(t, 2);
      cfg.seed = options.seed;
      ConfigurationSequence truth = simulate_paths(cfg);
      truth.coords.resize(static_cast<std::size_t>(t));
      const DissimilaritySequence d = measure_distances(truth, 0.0, options.seed);

      BenchCell cell{n, t, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      for (int rep = 0; rep < options.repeats; ++rep) {
        FitSpec joint = spec;
        joint.alpha = t >= 2 ? options.alpha : 0.0;
        cell.joint_seconds = std::min(cell.joint_seconds, seconds([&] { fit(d, joint, settings); }));
        cell.independent_seconds = std::min(cell.independent_seconds, seconds([&] {
          for (const Matrix& m : d.matrices) fit(make_sequence({m}), spec, settings);
        }));
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<EdgeRow> synthetic_tech_edgelist(std::uint64_t seed, bool unbalanced) {
  SyntheticTechOptions o;
  o.seed = seed;
  o.unbalanced = unbalanced;
  return synthetic_tech_edgelist(o);
}

std::vector<EdgeRow> synthetic_tech_edgelist(const SyntheticTechOptions& options) {
  const bool unbalanced = options.unbalanced;
  const int minor_dims = options.minor_dims;
  const double minor_spread = options.minor_spread;
  if (minor_dims < 0) fail(ErrorKind::config, "minor_dims must be nonnegative");
  if (minor_spread < 0.0 || options.minor_drift < 0.0 || options.score_noise < 0.0)
    fail(ErrorKind::config, "synthetic generator scales must be nonnegative");
  static const char* const kFirms[] = {"Altavia", "Bytecore", "Cirrusoft", "Dataforge", "Echelon",
                                       "Fluxwave", "Gridline", "Helixnet", "Ionware"};
  constexpr int kFirst = 1998;
  constexpr int kPeriods = 20;
  constexpr int kEntry = 4;  // index of 2002
  const int kDims = 2 + minor_dims;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Three segments with firms orbiting their centre in the first two
  // dimensions; the minor dimensions carry firm-specific profile traits.
  const double centres[3][2] = {{-1.2, 0.6}, {1.1, 0.8}, {0.0, -1.1}};
  const int n_firms = unbalanced ? 10 : 9;
  Matrix pos = Matrix::Zero(n_firms, kDims);
  Matrix vel = Matrix::Zero(n_firms, kDims);
  for (int i = 0; i < n_firms; ++i) {
    const int seg = i < 9 ? i / 3 : 1;
    pos(i, 0) = centres[seg][0] + 0.45 * normal(rng);
    pos(i, 1) = centres[seg][1] + 0.45 * normal(rng);
    for (int k = 2; k < kDims; ++k) pos(i, k) = minor_spread * normal(rng);
  }
  // The late entrant drifts from the internet segment toward media.
  Eigen::RowVectorXd target = Eigen::RowVectorXd::Zero(kDims);
  target(0) = -0.2;
  target(1) = 1.8;

  std::vector<EdgeRow> rows;
  for (int t = 0; t < kPeriods; ++t) {
    if (t > 0) {
      for (int i = 0; i < n_firms; ++i) {
        for (int k = 0; k < kDims; ++k) {
          const double scale = k < 2 ? 0.12 : 0.12 * minor_spread * options.minor_drift;
          vel(i, k) = 0.7 * vel(i, k) + 0.3 * scale * normal(rng);
        }
      }
      pos += vel;
      if (unbalanced) pos.row(9) += 0.05 * (target - pos.row(9));
    }
    const std::string period = std::to_string(kFirst + t);
    for (int i = 0; i < n_firms; ++i) {
      for (int j = i + 1; j < n_firms; ++j) {
        if ((i == 9 || j == 9) && t < kEntry) continue;
        const double dist = (pos.row(i) - pos.row(j)).norm();
        double score = 0.35 * std::exp(-dist) + options.score_noise * normal(rng);
        score = std::clamp(score, 0.002, 0.6);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", score);
        const std::string a = i < 9 ? kFirms[i] : "Zenithflix";
        const std::string b = j < 9 ? kFirms[j] : "Zenithflix";
        rows.push_back({period, a, b, std::stod(buf)});
      }
    }
  }
  return rows;
}

}  // namespace dynmap
