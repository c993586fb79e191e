#ifndef EXREG_MODEL_HPP
#define EXREG_MODEL_HPP

#include <Eigen/Core>

#include "exreg/student_t.hpp"
#include "exreg/types.hpp"

namespace exreg {

// Correlations entering the extremal-t density are clamped to this value
// before the exponent function is evaluated; the bivariate formulas are
// singular at rho = 1 and the limit is the comonotone case.
inline constexpr double kRhoClamp = 1.0 - 1e-9;

// Stationary anisotropic powered-exponential correlation exp(-|A h|^alpha).
double corr_stationary(const AnisotropyMatrix& A, double alpha, const Eigen::Vector2d& h);

// Kernel-convolution correlation between two locations carrying their own
// transformation matrices, with Omega_i = (A_i^T A_i)^{-1}:
//
//   |O1|^{1/4} |O2|^{1/4} |(O1+O2)/2|^{-1/2}
//     * exp(-(d^T ((O1+O2)/2)^{-1} d)^{alpha/2}),   d = s1 - s2.
//
// Bitwise-equal matrices delegate to corr_stationary so a constant field
// reproduces the stationary model exactly.
double corr_nonstationary(const AnisotropyMatrix& A1, const AnisotropyMatrix& A2, double alpha,
                          const Location& s1, const Location& s2);

// Bivariate extremal-t model at fixed global parameters. The exponent
// function, its partial derivatives and the pair log-density are closed
// forms in the Student-t CDF/density with nu + 1 degrees of freedom.
class ExtremalT {
 public:
  struct Partials {
    double dy1 = 0.0;
    double dy2 = 0.0;
    double dy1dy2 = 0.0;
  };

  // Per-sample quantities that do not depend on the correlation; fitting
  // loops precompute them once per (pair, observation).
  struct Terms {
    double q1 = 0.0;  // (y2/y1)^{1/nu}
    double q2 = 0.0;  // (y1/y2)^{1/nu}
    double iy1 = 0.0;
    double iy2 = 0.0;
  };

  explicit ExtremalT(const GlobalParams& g);

  const GlobalParams& globals() const { return globals_; }

  double exponent(double y1, double y2, double rho) const;
  Partials exponent_partials(double y1, double y2, double rho) const;
  double log_density(double y1, double y2, double rho) const;

  Terms terms(double y1, double y2) const;
  double log_density(const Terms& t, double rho) const;

  // Pairwise extremal coefficient V(1,1) = 2 T_{nu+1}(sqrt(nu+1) *
  // sqrt((1-rho)/(1+rho))); equals 1 at rho = 1 by the comonotone limit.
  double theta(double rho) const;

 private:
  void check_domain(double y1, double y2, double rho) const;

  GlobalParams globals_;
  StudentT t_;       // df = nu + 1
  double inv_nu_;
  double nu_plus1_;
};

// Free-function entry points mirroring the model operations.
double exponent_V(double y1, double y2, double rho, const GlobalParams& g);
ExtremalT::Partials exponent_V_partials(double y1, double y2, double rho, const GlobalParams& g);
double bivariate_log_density(double y1, double y2, double rho, const GlobalParams& g);
double theta_theoretical(double rho, const GlobalParams& g);

// Solve theta(rho) = theta for rho in [0, 1]; used to seed optimizer starts
// from madogram summaries. theta outside (1, 2) clamps to the boundary.
double invert_theta(double theta, const GlobalParams& g);

}  // namespace exreg

#endif
