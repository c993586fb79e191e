#include "exreg/covariance.hpp"

#include <Eigen/Cholesky>

#include "exreg/model.hpp"

namespace exreg {

Eigen::MatrixXd build_correlation_matrix(const ParameterField& field, bool stationary) {
  const long n = static_cast<long>(field.locations.size());
  Eigen::MatrixXd corr(n, n);
  std::vector<AnisotropyMatrix> mats;
  mats.reserve(n);
  for (const auto& p : field.params) mats.push_back(build_matrix(p, field.form));
  const double alpha = field.globals.alpha;
  for (long i = 0; i < n; ++i) {
    corr(i, i) = 1.0;
    for (long j = i + 1; j < n; ++j) {
      double r;
      if (stationary) {
        const Eigen::Vector2d h(field.locations[i].x - field.locations[j].x,
                                field.locations[i].y - field.locations[j].y);
        r = corr_stationary(mats[0], alpha, h);
      } else {
        r = corr_nonstationary(mats[i], mats[j], alpha, field.locations[i], field.locations[j]);
      }
      corr(i, j) = r;
      corr(j, i) = r;
    }
  }
  return corr;
}

CovarianceFactor factor_correlation_matrix(Eigen::MatrixXd corr) {
  const long n = corr.rows();
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd work = corr;
    if (jitter > 0.0) {
      // Jitter the diagonal, then rescale back to unit variances so the
      // factored matrix stays a correlation matrix.
      work.diagonal().array() += jitter;
      const double scale = 1.0 / (1.0 + jitter);
      work *= scale;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      CovarianceFactor out;
      out.corr = std::move(work);
      out.chol = llt.matrixL();
      out.jitter = jitter;
      return out;
    }
    if (jitter == 0.0)
      jitter = 1e-12;
    else if (jitter < 1e-6)
      jitter = std::min(jitter * 10.0, 1e-6);
    else
      throw IllConditionedCovarianceError(
          "factor_correlation_matrix: factorization failed at maximum jitter 1e-6 (n = " +
          std::to_string(n) + ")");
  }
}

CovarianceFactor factor_correlation(const ParameterField& field, bool stationary) {
  return factor_correlation_matrix(build_correlation_matrix(field, stationary));
}

}  // namespace exreg
