#include "exreg/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace exreg {

double corr_stationary(const AnisotropyMatrix& A, double alpha, const Eigen::Vector2d& h) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::domain_error("corr_stationary: alpha must be in (0, 2]");
  const double r = (A.m * h).norm();
  if (r == 0.0) return 1.0;
  return std::exp(-std::pow(r, alpha));
}

double corr_nonstationary(const AnisotropyMatrix& A1, const AnisotropyMatrix& A2, double alpha,
                          const Location& s1, const Location& s2) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::domain_error("corr_nonstationary: alpha must be in (0, 2]");
  if (A1.m == A2.m) {
    return corr_stationary(A1, alpha, Eigen::Vector2d(s1.x - s2.x, s1.y - s2.y));
  }
  const Eigen::Matrix2d g1 = A1.m.transpose() * A1.m;
  const Eigen::Matrix2d g2 = A2.m.transpose() * A2.m;
  const double det1 = g1.determinant();
  const double det2 = g2.determinant();
  if (!(det1 > 0.0) || !(det2 > 0.0))
    throw DegenerateMatrixError("corr_nonstationary: singular A^T A");
  const Eigen::Matrix2d omega1 = g1.inverse();
  const Eigen::Matrix2d omega2 = g2.inverse();
  const Eigen::Matrix2d mid = 0.5 * (omega1 + omega2);
  const double det_mid = mid.determinant();
  const double prefactor =
      std::pow(1.0 / det1, 0.25) * std::pow(1.0 / det2, 0.25) / std::sqrt(det_mid);
  const Eigen::Vector2d d(s1.x - s2.x, s1.y - s2.y);
  const double q = d.dot(mid.inverse() * d);
  if (q <= 0.0) return prefactor;
  return prefactor * std::exp(-std::pow(std::sqrt(q), alpha));
}

ExtremalT::ExtremalT(const GlobalParams& g) : globals_(g), t_(g.nu + 1.0) {
  g.validate();
  inv_nu_ = 1.0 / g.nu;
  nu_plus1_ = g.nu + 1.0;
}

void ExtremalT::check_domain(double y1, double y2, double rho) const {
  if (!(y1 > 0.0) || !(y2 > 0.0))
    throw std::domain_error("extremal-t exponent: arguments must be positive");
  if (!(rho > -1.0 && rho < 1.0))
    throw std::domain_error("extremal-t exponent: rho must lie in (-1, 1), got " +
                            std::to_string(rho));
}

ExtremalT::Terms ExtremalT::terms(double y1, double y2) const {
  const double q1 = std::pow(y2 / y1, inv_nu_);
  return Terms{q1, 1.0 / q1, 1.0 / y1, 1.0 / y2};
}

double ExtremalT::exponent(double y1, double y2, double rho) const {
  check_domain(y1, y2, rho);
  const Terms t = terms(y1, y2);
  const double c = std::sqrt(nu_plus1_ / (1.0 - rho * rho));
  return t.iy1 * t_.cdf(c * (t.q1 - rho)) + t.iy2 * t_.cdf(c * (t.q2 - rho));
}

ExtremalT::Partials ExtremalT::exponent_partials(double y1, double y2, double rho) const {
  check_domain(y1, y2, rho);
  const Terms t = terms(y1, y2);
  const double nu = globals_.nu;
  const double c = std::sqrt(nu_plus1_ / (1.0 - rho * rho));
  const double z1 = c * (t.q1 - rho);
  const double z2 = c * (t.q2 - rho);
  const double T1 = t_.cdf(z1), T2 = t_.cdf(z2);
  const double p1 = t_.pdf(z1), p2 = t_.pdf(z2);
  const double dp1 = t_.pdf_deriv_given(p1, z1), dp2 = t_.pdf_deriv_given(p2, z2);

  Partials out;
  out.dy1 = -t.iy1 * t.iy1 * T1 - c * t.q1 * p1 * t.iy1 * t.iy1 / nu +
            c * t.q2 * p2 * t.iy1 * t.iy2 / nu;
  out.dy2 = -t.iy2 * t.iy2 * T2 - c * t.q2 * p2 * t.iy2 * t.iy2 / nu +
            c * t.q1 * p1 * t.iy1 * t.iy2 / nu;
  const double s = 1.0 + 1.0 / nu;
  out.dy1dy2 = -(c * t.q1 / nu) * t.iy1 * t.iy1 * t.iy2 * (s * p1 + (c * t.q1 / nu) * dp1) -
               (c * t.q2 / nu) * t.iy1 * t.iy2 * t.iy2 * (s * p2 + (c * t.q2 / nu) * dp2);
  return out;
}

double ExtremalT::log_density(const Terms& t, double rho) const {
  const double nu = globals_.nu;
  const double c = std::sqrt(nu_plus1_ / (1.0 - rho * rho));
  const double z1 = c * (t.q1 - rho);
  const double z2 = c * (t.q2 - rho);
  const double T1 = t_.cdf(z1), T2 = t_.cdf(z2);
  const double p1 = t_.pdf(z1), p2 = t_.pdf(z2);
  const double dp1 = t_.pdf_deriv_given(p1, z1), dp2 = t_.pdf_deriv_given(p2, z2);

  const double v = t.iy1 * T1 + t.iy2 * T2;
  const double v1 = -t.iy1 * t.iy1 * T1 - c * t.q1 * p1 * t.iy1 * t.iy1 / nu +
                    c * t.q2 * p2 * t.iy1 * t.iy2 / nu;
  const double v2 = -t.iy2 * t.iy2 * T2 - c * t.q2 * p2 * t.iy2 * t.iy2 / nu +
                    c * t.q1 * p1 * t.iy1 * t.iy2 / nu;
  const double s = 1.0 + 1.0 / nu;
  const double v12 = -(c * t.q1 / nu) * t.iy1 * t.iy1 * t.iy2 * (s * p1 + (c * t.q1 / nu) * dp1) -
                     (c * t.q2 / nu) * t.iy1 * t.iy2 * t.iy2 * (s * p2 + (c * t.q2 / nu) * dp2);

  const double bracket = v1 * v2 - v12;
  if (!(bracket > 0.0) || !std::isfinite(v))
    throw NumericalDomainError("bivariate_log_density: non-positive or non-finite intermediate");
  return -v + std::log(bracket);
}

double ExtremalT::log_density(double y1, double y2, double rho) const {
  check_domain(y1, y2, rho);
  return log_density(terms(y1, y2), rho);
}

double ExtremalT::theta(double rho) const {
  if (!(rho > -1.0 && rho <= 1.0))
    throw std::domain_error("theta: rho must lie in (-1, 1]");
  if (rho == 1.0) return 1.0;
  return 2.0 * t_.cdf(std::sqrt(nu_plus1_ * (1.0 - rho) / (1.0 + rho)));
}

double exponent_V(double y1, double y2, double rho, const GlobalParams& g) {
  return ExtremalT(g).exponent(y1, y2, rho);
}

ExtremalT::Partials exponent_V_partials(double y1, double y2, double rho, const GlobalParams& g) {
  return ExtremalT(g).exponent_partials(y1, y2, rho);
}

double bivariate_log_density(double y1, double y2, double rho, const GlobalParams& g) {
  return ExtremalT(g).log_density(y1, y2, rho);
}

double theta_theoretical(double rho, const GlobalParams& g) { return ExtremalT(g).theta(rho); }

double invert_theta(double theta, const GlobalParams& g) {
  const ExtremalT model(g);
  if (theta <= 1.0) return 1.0;
  if (theta >= model.theta(0.0)) {
    // theta(rho) is decreasing; restrict the search to the nonnegative
    // correlations produced by the powered-exponential family.
    if (theta >= 2.0) return 0.0;
  }
  double lo = 0.0, hi = 1.0;  // theta(hi) = 1 <= theta <= theta(lo)
  if (theta >= model.theta(0.0)) return 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (model.theta(mid) > theta)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace exreg
