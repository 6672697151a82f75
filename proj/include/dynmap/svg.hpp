#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynmap/types.hpp"

namespace dynmap {

enum class PlotMode { static_map, dynamic_map, trajectories };
PlotMode parse_plot_mode(const std::string& s);

struct PlotOptions {
  PlotMode mode = PlotMode::static_map;
  std::size_t period = 0;              // static mode
  double transparency_start = 0.2;     // dynamic mode opacity of the first period
  double transparency_end = 1.0;       // and of the last
  bool show_arrows = false;
  bool show_labels = true;
  int width = 640;
  int height = 640;
  std::vector<std::string> colors;     // one per label, empty for the default
  std::vector<double> sizes;           // marker radii, one per label
  std::string title;
};

/// Deterministic SVG rendering. Objects absent from a period under `mask`
/// are omitted from that period. One-dimensional maps render on a line scale.
std::string render_svg(const ConfigurationSequence& x, const std::vector<std::string>& labels,
                       const std::vector<std::string>& periods, const PlotOptions& options,
                       const InclusionMask* mask = nullptr);

}  // namespace dynmap
