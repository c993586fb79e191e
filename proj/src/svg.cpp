#include "exreg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "exreg/csv.hpp"

namespace exreg {

namespace {

struct GridIndex {
  std::vector<double> xs, ys;           // sorted unique coordinates
  std::vector<std::vector<int>> cell;   // [iy][ix] -> location index
};

GridIndex index_grid(const std::vector<Location>& locations) {
  GridIndex g;
  auto key = [](double v) { return v; };
  std::map<double, int> xmap, ymap;
  for (const auto& s : locations) {
    xmap.emplace(key(s.x), 0);
    ymap.emplace(key(s.y), 0);
  }
  for (auto& [v, idx] : xmap) {
    idx = static_cast<int>(g.xs.size());
    g.xs.push_back(v);
  }
  for (auto& [v, idx] : ymap) {
    idx = static_cast<int>(g.ys.size());
    g.ys.push_back(v);
  }
  if (g.xs.size() * g.ys.size() != locations.size())
    throw UnsupportedLayoutError("render_heatmap_svg: locations do not form a complete grid");
  g.cell.assign(g.ys.size(), std::vector<int>(g.xs.size(), -1));
  for (int i = 0; i < static_cast<int>(locations.size()); ++i) {
    const int ix = xmap.at(locations[i].x);
    const int iy = ymap.at(locations[i].y);
    if (g.cell[iy][ix] != -1)
      throw UnsupportedLayoutError("render_heatmap_svg: duplicate grid cell");
    g.cell[iy][ix] = i;
  }
  return g;
}

std::string hex_color(unsigned rgb) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%06x", rgb & 0xffffffu);
  return buf;
}

std::string lerp_color(unsigned low, unsigned high, double t) {
  t = std::clamp(t, 0.0, 1.0);
  const auto ch = [&](int shift) {
    const double a = static_cast<double>((low >> shift) & 0xff);
    const double b = static_cast<double>((high >> shift) & 0xff);
    return static_cast<unsigned>(std::lround(a + (b - a) * t)) << shift;
  };
  return hex_color(ch(16) | ch(8) | ch(0));
}

}  // namespace

std::string render_heatmap_svg(const std::vector<Location>& locations,
                               const std::vector<double>& values,
                               const HeatmapOptions& options) {
  if (values.size() != locations.size())
    throw std::invalid_argument("render_heatmap_svg: value/location size mismatch");
  const GridIndex grid = index_grid(locations);
  const int nx = static_cast<int>(grid.xs.size());
  const int ny = static_cast<int>(grid.ys.size());
  const int cp = options.cell_pixels;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const double v : values) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const bool have_values = std::isfinite(lo);
  const double span = (have_values && hi > lo) ? hi - lo : 1.0;

  const int margin = 4;
  const int legend_w = 72;
  const int title_h = options.title.empty() ? 0 : 20;
  const int width = margin * 2 + nx * cp + legend_w;
  const int height = margin * 2 + ny * cp + title_h;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\">\n";
  if (!options.title.empty())
    svg += "<text x=\"" + std::to_string(margin) + "\" y=\"14\" font-size=\"12\" "
           "font-family=\"sans-serif\">" + options.title + "</text>\n";

  // y grows upward on the map, downward in SVG coordinates.
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int loc = grid.cell[iy][ix];
      const double v = values[loc];
      const std::string fill =
          std::isnan(v) ? hex_color(options.na_rgb)
                        : lerp_color(options.low_rgb, options.high_rgb,
                                     have_values ? (v - lo) / span : 0.5);
      const int px = margin + ix * cp;
      const int py = margin + title_h + (ny - 1 - iy) * cp;
      svg += "<rect x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(py) + "\" width=\"" +
             std::to_string(cp) + "\" height=\"" + std::to_string(cp) + "\" fill=\"" + fill +
             "\"/>\n";
    }
  }

  if (options.boundaries) {
    const auto& labels = options.boundaries->labels;
    if (labels.size() != locations.size())
      throw std::invalid_argument("render_heatmap_svg: boundary labels size mismatch");
    std::string path;
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const int a = grid.cell[iy][ix];
        const int px = margin + ix * cp;
        const int py = margin + title_h + (ny - 1 - iy) * cp;
        if (ix + 1 < nx && labels[a] != labels[grid.cell[iy][ix + 1]])
          path += "M" + std::to_string(px + cp) + " " + std::to_string(py) + "V" +
                  std::to_string(py + cp);
        if (iy + 1 < ny && labels[a] != labels[grid.cell[iy + 1][ix]])
          path += "M" + std::to_string(px) + " " + std::to_string(py) + "H" +
                  std::to_string(px + cp);
      }
    }
    if (!path.empty())
      svg += "<path d=\"" + path + "\" stroke=\"#222222\" stroke-width=\"1.5\" fill=\"none\"/>\n";
  }

  // Legend: vertical gradient bar with the value range.
  const int lx = margin + nx * cp + 12;
  const int ly = margin + title_h;
  const int lh = std::max(ny * cp, 40);
  const int steps = 24;
  for (int i = 0; i < steps; ++i) {
    const double t = 1.0 - (i + 0.5) / steps;
    svg += "<rect x=\"" + std::to_string(lx) + "\" y=\"" +
           std::to_string(ly + i * lh / steps) + "\" width=\"12\" height=\"" +
           std::to_string(lh / steps + 1) + "\" fill=\"" +
           lerp_color(options.low_rgb, options.high_rgb, t) + "\"/>\n";
  }
  const std::string top_label = have_values ? format_double(hi) : "";
  const std::string bottom_label = have_values ? format_double(lo) : "";
  svg += "<text x=\"" + std::to_string(lx + 16) + "\" y=\"" + std::to_string(ly + 10) +
         "\" font-size=\"10\" font-family=\"sans-serif\">" + top_label + "</text>\n";
  svg += "<text x=\"" + std::to_string(lx + 16) + "\" y=\"" + std::to_string(ly + lh) +
         "\" font-size=\"10\" font-family=\"sans-serif\">" + bottom_label + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace exreg
