#include "exreg/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <vector>

#include "exreg/parallel.hpp"

namespace exreg {

Eigen::VectorXd average_ranks(const Eigen::VectorXd& column) {
  const long m = column.size();
  std::vector<long> order(m);
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(),
            [&](long a, long b) { return column(a) < column(b); });
  Eigen::VectorXd ranks(m);
  long i = 0;
  while (i < m) {
    long j = i;
    while (j + 1 < m && column(order[j + 1]) == column(order[i])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (long k = i; k <= j; ++k) ranks(order[k]) = avg;
    i = j + 1;
  }
  return ranks;
}

ObservationSet rank_frechet_transform(const ObservationSet& obs) {
  if (obs.margins == Margins::unit_frechet) {
    std::cerr << "warning: rank_frechet_transform called on data already tagged unit-Frechet; "
                 "returning input unchanged\n";
    return obs;
  }
  const long m = obs.observations();
  if (m < 2) throw std::invalid_argument("rank_frechet_transform: need at least 2 observations");
  ObservationSet out;
  out.locations = obs.locations;
  out.margins = Margins::unit_frechet;
  out.data.resize(m, obs.size());
  for (long c = 0; c < obs.size(); ++c) {
    const Eigen::VectorXd col = obs.data.col(c);
    if (col.maxCoeff() == col.minCoeff())
      throw DegenerateColumnError("rank_frechet_transform: constant column " + std::to_string(c));
    const Eigen::VectorXd ranks = average_ranks(col);
    for (long r = 0; r < m; ++r)
      out.data(r, c) = -1.0 / std::log(ranks(r) / static_cast<double>(m + 1));
  }
  return out;
}

double fmadogram_theta_pair(const Eigen::VectorXd& ranks1, const Eigen::VectorXd& ranks2) {
  const long m = ranks1.size();
  const double scale = 1.0 / static_cast<double>(m + 1);
  double acc = 0.0;
  for (long i = 0; i < m; ++i) acc += std::fabs(ranks1(i) - ranks2(i)) * scale;
  const double nu_f = acc / (2.0 * static_cast<double>(m));
  const double theta = (1.0 + 2.0 * nu_f) / (1.0 - 2.0 * nu_f);
  return std::clamp(theta, 1.0, 2.0);
}

ThetaMatrix fmadogram_theta_matrix(const ObservationSet& obs, int threads) {
  const long m = obs.observations();
  const long n = obs.size();
  if (m < 2) throw std::invalid_argument("fmadogram_theta_matrix: need at least 2 observations");

  std::vector<Eigen::VectorXd> ranks(n);
  for (long c = 0; c < n; ++c) {
    const Eigen::VectorXd col = obs.data.col(c);
    if (col.maxCoeff() == col.minCoeff())
      throw DegenerateColumnError("fmadogram_theta_matrix: constant column " + std::to_string(c));
    ranks[c] = average_ranks(col);
  }

  ThetaMatrix out;
  out.theta.setOnes(n, n);
  parallel_for(n, threads > 0 ? threads : default_threads(), [&](long i) {
    for (long j = i + 1; j < n; ++j) {
      const double t = fmadogram_theta_pair(ranks[i], ranks[j]);
      out.theta(i, j) = t;
      out.theta(j, i) = t;
    }
  });
  out.theta.diagonal().setOnes();
  return out;
}

}  // namespace exreg
