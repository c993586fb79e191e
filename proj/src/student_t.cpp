#include "exreg/student_t.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exreg {

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double kFpMin = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("regularized_incomplete_beta: continued fraction did not converge");
}

// I_x(a, b) with log B(a, b) supplied by the caller.
double incbeta_with_logbeta(double a, double b, double x, double log_beta) {
  if (std::isnan(x)) return x;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("regularized_incomplete_beta: a and b must be positive");
  return incbeta_with_logbeta(a, b, x, log_beta_fn(a, b));
}

double student_t_cdf(double x, double df) {
  if (!(df > 0.0))
    throw std::domain_error("student_t_cdf: df must be positive, got " + std::to_string(df));
  if (std::isnan(x)) return x;
  if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
  const double ib = regularized_incomplete_beta(0.5 * df, 0.5, df / (df + x * x));
  return x >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

StudentT::StudentT(double df_) : df(df_) {
  if (!(df > 0.0)) throw std::domain_error("StudentT: df must be positive");
  log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) - 0.5 * std::log(df * M_PI);
  log_beta = log_beta_fn(0.5 * df, 0.5);
}

double StudentT::cdf(double x) const {
  if (std::isnan(x)) return x;
  if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
  const double ib = incbeta_with_logbeta(0.5 * df, 0.5, df / (df + x * x), log_beta);
  return x >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double StudentT::pdf(double x) const {
  return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

double StudentT::pdf_deriv(double x) const { return pdf_deriv_given(pdf(x), x); }

}  // namespace exreg
