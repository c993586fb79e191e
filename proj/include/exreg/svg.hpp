#ifndef EXREG_SVG_HPP
#define EXREG_SVG_HPP

#include <optional>
#include <string>
#include <vector>

#include "exreg/regionalize.hpp"
#include "exreg/types.hpp"

namespace exreg {

struct HeatmapOptions {
  std::string title;
  int cell_pixels = 14;
  // Two-stop linear palette, dark to light blue by default (low to high).
  unsigned low_rgb = 0x153c6b;
  unsigned high_rgb = 0xcfe5f5;
  unsigned na_rgb = 0xbbbbbb;
  std::optional<Clustering> boundaries;  // stroke cell edges between clusters
};

// One rectangle per grid cell with a linear color map and a legend. The
// locations must form a complete rectangular grid; anything else raises
// UnsupportedLayoutError. NaN values render in the NA color and are ignored
// by the color scale.
std::string render_heatmap_svg(const std::vector<Location>& locations,
                               const std::vector<double>& values,
                               const HeatmapOptions& options = {});

}  // namespace exreg

#endif
