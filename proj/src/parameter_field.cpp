#include "exreg/parameter_field.hpp"

#include <cmath>

namespace exreg {

void GridSpec::validate() const {
  if (!(resolution > 0.0)) throw std::invalid_argument("grid: resolution must be > 0");
  if (!(xmax >= xmin) || !(ymax >= ymin)) throw std::invalid_argument("grid: empty extent");
}

FieldPreset parse_preset(std::string_view name) {
  if (name == "example1") return FieldPreset::example1;
  if (name == "example2") return FieldPreset::example2;
  if (name == "example3") return FieldPreset::example3;
  if (name == "constant") return FieldPreset::constant;
  throw std::invalid_argument("unknown preset '" + std::string(name) +
                              "' (expected example1|example2|example3|constant)");
}

std::string preset_name(FieldPreset preset) {
  switch (preset) {
    case FieldPreset::example1: return "example1";
    case FieldPreset::example2: return "example2";
    case FieldPreset::example3: return "example3";
    case FieldPreset::constant: return "constant";
  }
  return "?";
}

bool ParameterField::constant() const {
  for (const auto& p : params) {
    if (p.a != params.front().a || p.b != params.front().b || p.gamma != params.front().gamma)
      return false;
  }
  return true;
}

namespace {

std::vector<Location> grid_locations(const GridSpec& g) {
  std::vector<Location> out;
  const long nx = static_cast<long>(std::floor((g.xmax - g.xmin) / g.resolution + 1e-9)) + 1;
  const long ny = static_cast<long>(std::floor((g.ymax - g.ymin) / g.resolution + 1e-9)) + 1;
  out.reserve(nx * ny);
  for (long iy = 0; iy < ny; ++iy)
    for (long ix = 0; ix < nx; ++ix)
      out.push_back(Location{g.xmin + ix * g.resolution, g.ymin + iy * g.resolution});
  return out;
}

AnisotropyParams preset_params(FieldPreset preset, const Location& s) {
  switch (preset) {
    case FieldPreset::example1:
      return AnisotropyParams{2.0, (s.x + 5.0) / 2.0, 0.0};
    case FieldPreset::example2:
      return AnisotropyParams{1.0, 3.0, wrap_angle_half_period((-s.x + 5.0) * M_PI / 2.0)};
    case FieldPreset::example3:
      return AnisotropyParams{(7.5 - std::hypot(s.x, s.y)) / 2.0 + 1.0, 0.0, 0.0};
    case FieldPreset::constant:
      return AnisotropyParams{1.0, 0.0, 0.0};
  }
  throw std::invalid_argument("unknown preset");
}

}  // namespace

ParameterField build_parameter_field(FieldPreset preset, const GridSpec& grid,
                                     const GlobalParams& globals,
                                     const FieldOverrides& overrides) {
  grid.validate();
  globals.validate();
  ParameterField field;
  field.globals = globals;
  field.locations = grid_locations(grid);
  if (field.locations.empty()) throw std::invalid_argument("grid: no locations");
  field.params.reserve(field.locations.size());
  for (const auto& s : field.locations) {
    AnisotropyParams p = preset_params(preset, s);
    if (overrides.a) p.a = *overrides.a;
    if (overrides.b) p.b = *overrides.b;
    if (overrides.gamma) p.gamma = wrap_angle_half_period(*overrides.gamma);
    p.validate();
    field.params.push_back(p);
  }
  return field;
}

}  // namespace exreg
