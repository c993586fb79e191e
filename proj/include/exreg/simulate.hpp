#ifndef EXREG_SIMULATE_HPP
#define EXREG_SIMULATE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "exreg/covariance.hpp"
#include "exreg/parameter_field.hpp"

namespace exreg {

enum class Margins { raw, unit_frechet };

// m independent field observations on n fixed locations; rows are
// observations, columns follow the location order.
struct ObservationSet {
  std::vector<Location> locations;
  Eigen::MatrixXd data;  // m x n
  Margins margins = Margins::raw;
  long observations() const { return data.rows(); }
  long size() const { return data.cols(); }
  void validate() const;
};

// Normalizing constant c_nu of the spectral process c_nu * max(0, G)^nu,
// from the closed-form moment E[max(0, G)^nu] of the truncated Gaussian
// power.
double spectral_normalizer(double nu);

struct SimulationOptions {
  int threads = 0;              // 0 = hardware concurrency
  bool spectral_approx = false; // truncated spectral sampler instead of the exact one
  double accuracy = 1e-3;       // per-function exceedance bound of the truncation
  long max_spectral_points = 100000;  // budget per field draw
};

// m independent draws of the underlying Gaussian field (unit variance, the
// factored correlation); deterministic given the seed, rows independent.
Eigen::MatrixXd gaussian_sample(const CovarianceFactor& factor, long m, std::uint64_t seed,
                                int threads = 0);
Eigen::MatrixXd gaussian_sample(const ParameterField& field, bool stationary, long m,
                                std::uint64_t seed, int threads = 0);

// m independent extremal-t max-stable fields with unit Frechet margins.
// The default sampler builds each field from extremal functions (one
// Poisson-process sweep per location conditioned on that location), which is
// exact; options.spectral_approx selects the truncated spectral construction
// instead.
ObservationSet max_stable_sample(const ParameterField& field, bool stationary, long m,
                                 std::uint64_t seed, const SimulationOptions& options = {});
ObservationSet max_stable_sample(const ParameterField& field, const CovarianceFactor& factor,
                                 long m, std::uint64_t seed,
                                 const SimulationOptions& options = {});

}  // namespace exreg

#endif
