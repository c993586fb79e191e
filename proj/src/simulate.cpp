#include "exreg/simulate.hpp"

#include <cmath>
#include <random>

#include "exreg/parallel.hpp"
#include "exreg/rng.hpp"

namespace exreg {

void ObservationSet::validate() const {
  if (static_cast<long>(locations.size()) != data.cols())
    throw std::invalid_argument("ObservationSet: location/column count mismatch");
  if (!data.allFinite()) throw std::invalid_argument("ObservationSet: non-finite values");
  if (margins == Margins::unit_frechet && (data.array() <= 0.0).any())
    throw std::invalid_argument("ObservationSet: unit-Frechet data must be positive");
}

double spectral_normalizer(double nu) {
  if (!(nu >= 1.0)) throw std::domain_error("spectral_normalizer: nu must be >= 1");
  // E[max(0,G)^nu] = 2^{nu/2 - 1} Gamma((nu+1)/2) / sqrt(pi)
  const double log_moment =
      (0.5 * nu - 1.0) * std::log(2.0) + std::lgamma(0.5 * (nu + 1.0)) - 0.5 * std::log(M_PI);
  return std::exp(-log_moment);
}

namespace {

Eigen::VectorXd standard_normal_vector(std::mt19937_64& rng, long n) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(n);
  for (long i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

// Upper standard-normal quantile: P(G > q) = p, solved on erfc.
double normal_upper_quantile(double p) {
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// One exact field draw via extremal functions. At each location k a Poisson
// process of intensity z^{-2} dz is swept downward; the spectral function is
// conditioned on that location through the chi(nu+1)-distributed value R and
// the usual Gaussian conditioning, so Y(x_k) = 1 by construction.
void sample_field_exact(const CovarianceFactor& factor, double nu, std::mt19937_64& rng,
                        Eigen::VectorXd& z_out) {
  const long n = factor.corr.rows();
  std::exponential_distribution<double> exponential(1.0);
  std::chi_squared_distribution<double> chi2(nu + 1.0);

  z_out.setZero(n);
  Eigen::VectorXd gstar(n), y(n);
  for (long k = 0; k < n; ++k) {
    double acc = exponential(rng);
    double xi = 1.0 / acc;
    while (xi > z_out(k)) {
      const double r = std::sqrt(chi2(rng));
      gstar.noalias() = factor.chol * standard_normal_vector(rng, n);
      // Conditional field given G(x_k) = r; unit diagonal makes the kriging
      // weights the k-th correlation column.
      const double shift = r - gstar(k);
      bool accept = true;
      for (long j = 0; j < k; ++j) {
        const double g = gstar(j) + factor.corr(j, k) * shift;
        y(j) = g > 0.0 ? std::pow(g / r, nu) : 0.0;
        if (xi * y(j) >= z_out(j)) {
          accept = false;
          break;
        }
      }
      if (accept) {
        z_out(k) = std::max(z_out(k), xi);  // y(k) = 1
        for (long j = k + 1; j < n; ++j) {
          const double g = gstar(j) + factor.corr(j, k) * shift;
          const double yj = g > 0.0 ? std::pow(g / r, nu) : 0.0;
          z_out(j) = std::max(z_out(j), xi * yj);
        }
      }
      acc += exponential(rng);
      xi = 1.0 / acc;
    }
  }
}

// Truncated spectral construction: spectral functions are stacked until the
// next Poisson point, multiplied by a high quantile of the spectral bound,
// cannot change the current minimum. The bound B = c_nu * q^nu with
// P(G > q) = accuracy / n keeps the per-function exceedance probability at
// the requested accuracy (union bound over locations).
void sample_field_spectral(const CovarianceFactor& factor, double nu, double c_nu, double bound,
                           long max_points, std::mt19937_64& rng, Eigen::VectorXd& z_out) {
  const long n = factor.corr.rows();
  std::exponential_distribution<double> exponential(1.0);
  z_out.setZero(n);
  double acc = 0.0;
  for (long it = 0; it < max_points; ++it) {
    acc += exponential(rng);
    const double zeta = 1.0 / acc;
    const Eigen::VectorXd g = factor.chol * standard_normal_vector(rng, n);
    for (long j = 0; j < n; ++j) {
      const double w = g(j) > 0.0 ? c_nu * std::pow(g(j), nu) : 0.0;
      z_out(j) = std::max(z_out(j), zeta * w);
    }
    if (zeta * bound <= z_out.minCoeff()) return;
  }
  throw SimulationBudgetError(
      "max_stable_sample: spectral truncation did not reach the requested accuracy within " +
      std::to_string(max_points) + " points");
}

}  // namespace

Eigen::MatrixXd gaussian_sample(const CovarianceFactor& factor, long m, std::uint64_t seed,
                                int threads) {
  if (m < 1) throw std::invalid_argument("gaussian_sample: m must be >= 1");
  const long n = factor.corr.rows();
  Eigen::MatrixXd out(m, n);
  parallel_for(m, threads > 0 ? threads : default_threads(), [&](long i) {
    auto rng = make_engine(seed, Stream::gaussian, static_cast<std::uint64_t>(i));
    out.row(i) = (factor.chol * standard_normal_vector(rng, n)).transpose();
  });
  return out;
}

Eigen::MatrixXd gaussian_sample(const ParameterField& field, bool stationary, long m,
                                std::uint64_t seed, int threads) {
  return gaussian_sample(factor_correlation(field, stationary), m, seed, threads);
}

ObservationSet max_stable_sample(const ParameterField& field, const CovarianceFactor& factor,
                                 long m, std::uint64_t seed, const SimulationOptions& options) {
  if (m < 1) throw std::invalid_argument("max_stable_sample: m must be >= 1");
  field.globals.validate();
  const double nu = field.globals.nu;
  const long n = factor.corr.rows();

  ObservationSet obs;
  obs.locations = field.locations;
  obs.margins = Margins::unit_frechet;
  obs.data.resize(m, n);

  const int threads = options.threads > 0 ? options.threads : default_threads();
  if (!options.spectral_approx) {
    parallel_for(m, threads, [&](long i) {
      auto rng = make_engine(seed, Stream::max_stable, static_cast<std::uint64_t>(i));
      Eigen::VectorXd z;
      sample_field_exact(factor, nu, rng, z);
      obs.data.row(i) = z.transpose();
    });
  } else {
    if (!(options.accuracy > 0.0 && options.accuracy < 1.0))
      throw std::invalid_argument("max_stable_sample: accuracy must lie in (0, 1)");
    const double c_nu = spectral_normalizer(nu);
    const double q = normal_upper_quantile(options.accuracy / static_cast<double>(n));
    const double bound = c_nu * std::pow(q, nu);
    parallel_for(m, threads, [&](long i) {
      auto rng = make_engine(seed, Stream::spectral, static_cast<std::uint64_t>(i));
      Eigen::VectorXd z;
      sample_field_spectral(factor, nu, c_nu, bound, options.max_spectral_points, rng, z);
      obs.data.row(i) = z.transpose();
    });
  }
  return obs;
}

ObservationSet max_stable_sample(const ParameterField& field, bool stationary, long m,
                                 std::uint64_t seed, const SimulationOptions& options) {
  return max_stable_sample(field, factor_correlation(field, stationary), m, seed, options);
}

}  // namespace exreg
