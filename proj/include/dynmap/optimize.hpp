#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dynmap/types.hpp"

namespace dynmap {

struct OptimizerSettings {
  int n_iter = 2000;
  double tol = 1e-4;          // threshold on the RMS gradient entry
  double step_size = 1.0;     // t-SNE learning rate is step_size * 200
  int n_inits = 1;
  std::optional<ConfigurationSequence> init;  // when set, n_inits is ignored
  int n_iter_check = 50;
  int verbose = 0;
  std::uint64_t seed = 0;
  int max_halvings = 16;
  double momentum = 0.8;      // t-SNE only
  double min_cost_decrease = 1e-10;  // per n_iter_check iterations
  bool fixed_iterations = false;     // ignore every stopping rule except n_iter
  std::ostream* log = nullptr;       // diagnostics sink; std::cerr when null

  void validate() const;
};

enum class StopReason { converged, max_iterations, plateau, line_search_failed };

struct TraceEntry {
  int iteration;
  double cost;
  double grad_norm;
};

struct FitResult {
  ConfigurationSequence coords;
  double cost_total_final = 0.0;
  double cost_static_avg = 0.0;
  std::vector<double> static_costs;
  double grad_norm_final = 0.0;
  bool converged = false;
  int iterations_used = 0;
  int init_index_selected = 0;
  StopReason stop = StopReason::max_iterations;
  Method method = Method::mds;
  std::vector<TraceEntry> trace;  // every n_iter_check iterations
};

/// Jointly fits one configuration per period. MDS and Sammon use gradient
/// descent with backtracking by step halving; t-SNE uses momentum with
/// per-parameter gains. Restarts run from seed + index and the lowest final
/// cost wins (ties to the lowest index).
FitResult fit(const DissimilaritySequence& d, const FitSpec& spec, const OptimizerSettings& settings,
              const InclusionMask* mask = nullptr);

/// Standard normal x 1e-2 coordinates, one independent draw per period.
ConfigurationSequence random_init(Index n, Index dims, std::size_t periods, std::uint64_t seed);

/// Classical scaling of each period's included submatrix; absent objects sit
/// at the origin. With `first_only`, every period copies period 1's solution.
ConfigurationSequence cmds_init(const DissimilaritySequence& d, int dims, const InclusionMask* mask = nullptr,
                                bool first_only = false);

/// Diagnostic lines for a finished fit: nothing at verbose 0, banner and
/// terminal line at 1, plus one line per trace entry at 2.
std::vector<std::string> describe_progress(const FitResult& result, int verbose);

std::string to_string(StopReason r);

}  // namespace dynmap
