#ifndef EXREG_PARAMETER_FIELD_HPP
#define EXREG_PARAMETER_FIELD_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exreg/types.hpp"

namespace exreg {

// Rectangular grid; locations are emitted with x varying fastest.
struct GridSpec {
  double xmin = -5.0;
  double xmax = 5.0;
  double ymin = -5.0;
  double ymax = 5.0;
  double resolution = 0.5;
  void validate() const;
};

enum class FieldPreset { example1, example2, example3, constant };

FieldPreset parse_preset(std::string_view name);
std::string preset_name(FieldPreset preset);

// Constant values that replace the preset formula for individual parameters.
struct FieldOverrides {
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> gamma;
};

// Per-location ellipse parameters plus the process-wide globals.
struct ParameterField {
  std::vector<Location> locations;
  std::vector<AnisotropyParams> params;
  GlobalParams globals;
  MatrixForm form = MatrixForm::standard;
  bool constant() const;
};

// Scenario presets:
//   example1: a = 2,                b = (x+5)/2, gamma = 0
//   example2: a = 1,                b = 3,       gamma = (-x+5)*pi/2 mod pi
//   example3: a = (7.5-|s|)/2 + 1,  b = 0,       gamma = 0
//   constant: a = 1, b = 0, gamma = 0 unless overridden
ParameterField build_parameter_field(FieldPreset preset, const GridSpec& grid,
                                     const GlobalParams& globals,
                                     const FieldOverrides& overrides = {});

}  // namespace exreg

#endif
