#ifndef EXREG_STUDENT_T_HPP
#define EXREG_STUDENT_T_HPP

namespace exreg {

// Regularized incomplete beta function I_x(a, b), evaluated with the modified
// Lentz continued fraction. Absolute error below 1e-12 on the parameter
// ranges used here (a = df/2, b = 1/2).
double regularized_incomplete_beta(double a, double b, double x);

// CDF of the Student-t distribution with df > 0 degrees of freedom.
double student_t_cdf(double x, double df);

// Fixed-df Student-t evaluations. The log normalizer and the beta-function
// constant are cached because these sit inside every bivariate likelihood
// term.
struct StudentT {
  double df = 1.0;
  double log_norm = 0.0;   // density normalizer
  double log_beta = 0.0;   // log B(df/2, 1/2)
  explicit StudentT(double df_);
  double cdf(double x) const;
  double pdf(double x) const;
  double pdf_deriv(double x) const;
  // Density derivative when the density at x is already known.
  double pdf_deriv_given(double pdf_x, double x) const {
    return -pdf_x * (df + 1.0) * x / (df + x * x);
  }
};

}  // namespace exreg

#endif
