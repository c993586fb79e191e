#ifndef EXREG_TYPES_HPP
#define EXREG_TYPES_HPP

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace exreg {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy shared across modules.
struct DegenerateMatrixError : std::domain_error {
  using std::domain_error::domain_error;
};
struct NumericalDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateColumnError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NoPairsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ClusterTooSmallError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct FitFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IllConditionedCovarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SimulationBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedLayoutError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Location {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Location& p, const Location& q) {
  return std::hypot(p.x - q.x, p.y - q.y);
}

// Process-wide parameters shared by every local or per-cluster model.
struct GlobalParams {
  double nu = 1.0;     // degrees-of-freedom exponent, >= 1
  double alpha = 1.0;  // powered-exponential exponent, in (0, 2]
  void validate() const;
};

// Local ellipse parameters.
struct AnisotropyParams {
  double a = 1.0;      // > 0
  double b = 0.0;      // >= 0
  double gamma = 0.0;  // radians, in [0, pi)
  void validate() const;
};

struct AnisotropyMatrix {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
};

// Reduce an angle modulo pi into [0, pi).
double wrap_angle_half_period(double gamma);

// The `rotation` form parametrizes the ellipse with axis lengths a and a+b
// and rotation gamma; selectable from configuration, default everywhere is
// `standard`.
enum class MatrixForm { standard, rotation };

// Matrix entries straight from (a, b, gamma), no range checks. In the
// standard form the 0/0 entry at sin(gamma) = 0, b = 0 is defined as 0, which
// keeps the matrix finite and the induced correlation isotropic with range
// a + b. Used directly by the optimizer, which walks gamma outside [0, pi).
Eigen::Matrix2d anisotropy_entries(double a, double b, double gamma,
                                   MatrixForm form = MatrixForm::standard);

// Validating constructor for the transformation matrix. Throws
// DegenerateMatrixError when b = 0 with sin(gamma) != 0 in the standard form
// (an entry would be infinite).
AnisotropyMatrix build_matrix(const AnisotropyParams& p, MatrixForm form = MatrixForm::standard);

// Alternative parametrization with axis lengths a and a+b and rotation gamma.
AnisotropyMatrix build_matrix_rotation_form(const AnisotropyParams& p);

}  // namespace exreg

#endif
