#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynmap/optimize.hpp"
#include "dynmap/preprocess.hpp"

namespace dynmap {

struct SimConfig {
  int n = 6;
  int t = 10;
  double scale = 1.0;
  double noise = 0.25;
  double momentum = 0.6;
  double measurement_noise = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Momentum random walk in two dimensions.
ConfigurationSequence simulate_paths(const SimConfig& cfg);

/// Perturbs a copy of each period's positions by Normal(0, noise^2) per
/// coordinate and returns the Euclidean distances of the perturbed points.
DissimilaritySequence measure_distances(const ConfigurationSequence& truth, double measurement_noise,
                                        std::uint64_t seed);

/// Mean per-period Procrustes distance between a fit and the truth.
double mean_procrustes_distance(const ConfigurationSequence& fitted, const ConfigurationSequence& truth);

struct RecoveryCell {
  double noise = 0.0;
  double alpha = 0.0;
  double stress = 0.0;
  double procrustes = 0.0;
  int reps = 0;
  int failures = 0;
};

struct RecoveryOptions {
  std::vector<double> noise_levels = {0.01, 0.5};
  std::vector<double> alpha_levels = {0.0, 0.3};
  int reps = 10;
  SimConfig base;      // measurement_noise is overwritten per cell
  FitSpec spec;        // method forced to ratio MDS
  OptimizerSettings settings;
};

RecoveryOptions default_recovery_options();

/// One aggregate row per (noise, alpha) in input order. Rep r uses simulation
/// seed base.seed + r for every noise level and alpha.
std::vector<RecoveryCell> recovery_study(const RecoveryOptions& options);

struct BenchCell {
  int n = 0;
  int t = 0;
  double joint_seconds = 0.0;
  double independent_seconds = 0.0;
};

struct BenchOptions {
  std::vector<int> n_list = {10, 50, 100};
  std::vector<int> t_list = {10, 50, 100};
  int iterations = 750;
  int repeats = 1;   // the minimum over repeats is reported
  double alpha = 0.2;
  std::uint64_t seed = 0;
};

/// Wall-clock seconds of a joint fit and of t independent static fits, both
/// run for exactly `iterations` gradient steps with tol 0.
std::vector<BenchCell> runtime_benchmark(const BenchOptions& options);

/// Generator knobs for the synthetic firm profiles.
struct SyntheticTechOptions {
  std::uint64_t seed = 7;
  bool unbalanced = false;
  int minor_dims = 12;        // latent traits beyond the two segment dimensions
  double minor_spread = 0.4;  // initial sd of the minor traits
  double minor_drift = 0.25;  // step scale of the minor traits relative to the segment ones
  double score_noise = 0.006;
};

/// Fictional technology-firm similarity edgelist for 1998-2017: nine firms in
/// three drifting segments; minor latent dimensions add structure a plane cannot hold. With
/// `unbalanced`, a tenth firm enters in 2002.
std::vector<EdgeRow> synthetic_tech_edgelist(const SyntheticTechOptions& options);
std::vector<EdgeRow> synthetic_tech_edgelist(std::uint64_t seed = 7, bool unbalanced = false);

}  // namespace dynmap
