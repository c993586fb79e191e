#ifndef EXREG_EMPIRICAL_HPP
#define EXREG_EMPIRICAL_HPP

#include <Eigen/Core>

#include "exreg/simulate.hpp"

namespace exreg {

// Average ranks (1-based, ties averaged) of a column.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& column);

// Rank-based transformation to unit Frechet margins: values are replaced by
// -1/log(rank/(m+1)) per location. Input already tagged unit-Frechet is
// returned unchanged with a warning on stderr.
ObservationSet rank_frechet_transform(const ObservationSet& obs);

// Symmetric matrix of pairwise extremal-coefficient estimates; diagonal 1,
// entries clamped into [1, 2].
struct ThetaMatrix {
  Eigen::MatrixXd theta;
};

// F-madogram estimate for one pair of columns: nu_F = mean |F1 - F2| / 2 with
// empirical CDFs rank/(m+1); theta = (1 + 2 nu_F)/(1 - 2 nu_F).
double fmadogram_theta_pair(const Eigen::VectorXd& ranks1, const Eigen::VectorXd& ranks2);

ThetaMatrix fmadogram_theta_matrix(const ObservationSet& obs, int threads = 0);

}  // namespace exreg

#endif
