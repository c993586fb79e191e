#ifndef EXREG_COVARIANCE_HPP
#define EXREG_COVARIANCE_HPP

#include <Eigen/Core>

#include "exreg/parameter_field.hpp"
#include "exreg/types.hpp"

namespace exreg {

// Correlation matrix of the underlying Gaussian field. With `stationary` the
// transformation matrix of the first location is used everywhere; otherwise
// the kernel-convolution correlation couples the per-location matrices.
Eigen::MatrixXd build_correlation_matrix(const ParameterField& field, bool stationary);

// Lower-triangular factor of the (possibly jittered) correlation matrix.
// `corr` stores the matrix the factor actually reproduces: after jittering
// the diagonal is rescaled back to one.
struct CovarianceFactor {
  Eigen::MatrixXd corr;
  Eigen::MatrixXd chol;
  double jitter = 0.0;
};

// Cholesky with escalating diagonal jitter (1e-12, x10 steps, cap 1e-6).
// Throws IllConditionedCovarianceError when the cap is reached.
CovarianceFactor factor_correlation_matrix(Eigen::MatrixXd corr);

CovarianceFactor factor_correlation(const ParameterField& field, bool stationary);

}  // namespace exreg

#endif
