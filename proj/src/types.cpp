#include "exreg/types.hpp"

#include <string>

namespace exreg {

void GlobalParams::validate() const {
  if (!(nu >= 1.0) || !std::isfinite(nu))
    throw std::invalid_argument("GlobalParams: nu must be >= 1, got " + std::to_string(nu));
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("GlobalParams: alpha must be in (0, 2], got " + std::to_string(alpha));
}

void AnisotropyParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("AnisotropyParams: a must be > 0, got " + std::to_string(a));
  if (!(b >= 0.0) || !std::isfinite(b))
    throw std::invalid_argument("AnisotropyParams: b must be >= 0, got " + std::to_string(b));
  if (!(gamma >= 0.0 && gamma < M_PI))
    throw std::invalid_argument("AnisotropyParams: gamma must lie in [0, pi), got " + std::to_string(gamma));
}

double wrap_angle_half_period(double gamma) {
  double g = std::fmod(gamma, M_PI);
  if (g < 0.0) g += M_PI;
  if (g >= M_PI) g = 0.0;  // fmod rounding at the boundary
  return g;
}

Eigen::Matrix2d anisotropy_entries(double a, double b, double gamma, MatrixForm form) {
  const double s = std::sin(gamma);
  const double c = std::cos(gamma);
  Eigen::Matrix2d m;
  if (form == MatrixForm::rotation) {
    m(0, 0) = c / (a + b);
    m(0, 1) = s / (a + b);
    m(1, 0) = -s / a;
    m(1, 1) = c / a;
    return m;
  }
  m(0, 0) = s / a;
  m(0, 1) = c / (a + b);
  m(1, 0) = -c / (a + b);
  m(1, 1) = (s == 0.0 && b == 0.0) ? 0.0 : s / b;
  return m;
}

AnisotropyMatrix build_matrix(const AnisotropyParams& p, MatrixForm form) {
  p.validate();
  if (form == MatrixForm::standard && p.b == 0.0 && std::sin(p.gamma) != 0.0)
    throw DegenerateMatrixError("build_matrix: b = 0 with sin(gamma) != 0 gives an infinite entry");
  return AnisotropyMatrix{anisotropy_entries(p.a, p.b, p.gamma, form)};
}

AnisotropyMatrix build_matrix_rotation_form(const AnisotropyParams& p) {
  return build_matrix(p, MatrixForm::rotation);
}

}  // namespace exreg
