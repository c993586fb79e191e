#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "exreg/empirical.hpp"
#include "exreg/model.hpp"
#include "exreg/simulate.hpp"

using namespace exreg;

namespace {

// One-sample Kolmogorov-Smirnov distance against the unit Frechet CDF.
double ks_unit_frechet(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = std::exp(-1.0 / sample[i]);
    d = std::max(d, std::fabs((i + 1) / n - f));
    d = std::max(d, std::fabs(f - i / n));
  }
  return d;
}

double ks_critical_1pct(long m) { return 1.62762 / std::sqrt(static_cast<double>(m)); }

ParameterField small_constant_field(double a, double b, double gamma, GlobalParams g,
                                    int side, double step) {
  GridSpec grid{0.0, (side - 1) * step, 0.0, (side - 1) * step, step};
  FieldOverrides ov;
  ov.a = a;
  ov.b = b;
  ov.gamma = gamma;
  return build_parameter_field(FieldPreset::constant, grid, g, ov);
}

}  // namespace

TEST_CASE("parameter field presets follow the scenario formulas") {
  const GlobalParams g{5.0, 1.0};
  const GridSpec grid{-5.0, 5.0, -5.0, 5.0, 0.5};
  const ParameterField f1 = build_parameter_field(FieldPreset::example1, grid, g);
  CHECK(f1.locations.size() == 441);
  bool found = false;
  for (std::size_t i = 0; i < f1.locations.size(); ++i) {
    if (f1.locations[i].x == -3.0 && f1.locations[i].y == 2.0) {
      found = true;
      CHECK(f1.params[i].a == 2.0);
      CHECK(f1.params[i].b == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(f1.params[i].gamma == 0.0);
    }
  }
  CHECK(found);

  const ParameterField f2 = build_parameter_field(FieldPreset::example2, grid, g);
  for (std::size_t i = 0; i < f2.locations.size(); ++i) {
    CHECK(f2.params[i].gamma >= 0.0);
    CHECK(f2.params[i].gamma < M_PI);
    if (f2.locations[i].x == 5.0) CHECK(f2.params[i].gamma == doctest::Approx(0.0));
    if (f2.locations[i].x == 4.0) CHECK(f2.params[i].gamma == doctest::Approx(M_PI / 2.0));
  }

  const ParameterField f3 = build_parameter_field(FieldPreset::example3, grid, g);
  for (std::size_t i = 0; i < f3.locations.size(); ++i) {
    if (f3.locations[i].x == 0.0 && f3.locations[i].y == 0.0) {
      CHECK(f3.params[i].a == doctest::Approx(4.75));
      CHECK(f3.params[i].b == 0.0);
    }
  }

  CHECK_THROWS_AS(parse_preset("example9"), std::invalid_argument);
  CHECK_THROWS_AS(build_parameter_field(FieldPreset::example1, {-5, 5, -5, 5, -1.0}, g),
                  std::invalid_argument);
}

TEST_CASE("covariance factor reproduces the correlation matrix") {
  const GlobalParams g{5.0, 1.0};
  const GridSpec grid{-5.0, 5.0, -5.0, 5.0, 1.0};
  const ParameterField field = build_parameter_field(FieldPreset::example1, grid, g);
  const CovarianceFactor factor = factor_correlation(field, false);
  const Eigen::MatrixXd rebuilt = factor.chol * factor.chol.transpose();
  CHECK((rebuilt - factor.corr).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(factor.jitter <= 1e-6);
  CHECK(factor.corr.diagonal().maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("gaussian sampler marginal variance and pair correlation") {
  const GlobalParams g{5.0, 1.0};
  const ParameterField field = small_constant_field(2.0, 0.0, 0.0, g, 3, 1.0);
  const CovarianceFactor factor = factor_correlation(field, true);
  const long m = 10000;
  const Eigen::MatrixXd x = gaussian_sample(factor, m, 99u);
  for (long c = 0; c < x.cols(); ++c) {
    const double var = x.col(c).squaredNorm() / m - std::pow(x.col(c).mean(), 2);
    CHECK(var > 0.95);
    CHECK(var < 1.05);
  }
  // Lag-1 neighbors: rho = exp(-1/2).
  const double expect = std::exp(-0.5);
  const double corr01 = (x.col(0).dot(x.col(1)) / m - x.col(0).mean() * x.col(1).mean());
  CHECK(std::fabs(corr01 - expect) < 0.03);

  const Eigen::MatrixXd again = gaussian_sample(factor, m, 99u);
  CHECK((again - x).cwiseAbs().maxCoeff() == 0.0);  // bitwise reproducible
}

TEST_CASE("spectral normalizer matches quadrature of the truncated moment") {
  for (const double nu : {1.0, 2.0, 3.5, 5.0, 7.0}) {
    // Simpson for E[max(0,G)^nu] on [0, 40].
    const int n = 4000;
    const double h = 40.0 / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double t = i * h;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += w * std::pow(t, nu) * std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
    }
    acc *= h / 3.0;
    CHECK(spectral_normalizer(nu) == doctest::Approx(1.0 / acc).epsilon(1e-8));
  }
  CHECK(spectral_normalizer(1.0) == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("max-stable margins are unit Frechet (exact sampler)") {
  const GlobalParams g{3.0, 1.0};
  const ParameterField field = small_constant_field(1.0, 0.0, 0.0, g, 1, 1.0);
  const long m = 10000;
  const ObservationSet obs = max_stable_sample(field, true, m, 4242u);
  CHECK(obs.margins == Margins::unit_frechet);
  std::vector<double> sample(obs.data.col(0).data(), obs.data.col(0).data() + m);
  CHECK(ks_unit_frechet(sample) < ks_critical_1pct(m));
}

TEST_CASE("max-stable margins are unit Frechet (spectral sampler)") {
  const GlobalParams g{3.0, 1.0};
  const ParameterField field = small_constant_field(1.0, 0.0, 0.0, g, 1, 1.0);
  SimulationOptions opt;
  opt.spectral_approx = true;
  opt.accuracy = 1e-3;
  const long m = 4000;
  const ObservationSet obs = max_stable_sample(field, true, m, 777u, opt);
  std::vector<double> sample(obs.data.col(0).data(), obs.data.col(0).data() + m);
  CHECK(ks_unit_frechet(sample) < ks_critical_1pct(m));

  SimulationOptions starved = opt;
  starved.max_spectral_points = 2;
  CHECK_THROWS_AS(max_stable_sample(field, true, 50, 777u, starved), SimulationBudgetError);
}

TEST_CASE("madogram theta matches the closed form on stationary samples") {
  const GlobalParams g{5.0, 1.0};
  const ParameterField field = small_constant_field(2.0, 0.0, 0.0, g, 3, 1.0);
  const long m = 5000;
  const ObservationSet obs = max_stable_sample(field, true, m, 31337u);
  const ThetaMatrix theta = fmadogram_theta_matrix(obs);
  const AnisotropyMatrix a = build_matrix({2.0, 0.0, 0.0});
  const ExtremalT model(g);
  // Lag-1 pair (0,1).
  const double expect = model.theta(corr_stationary(a, 1.0, {1.0, 0.0}));
  CHECK(std::fabs(theta.theta(0, 1) - expect) < 0.05);
  // All pairs within 3 Monte Carlo standard errors (delta method), with a
  // small floor for the near-deterministic ones.
  for (long i = 0; i < obs.size(); ++i) {
    const Eigen::VectorXd ri = average_ranks(obs.data.col(i));
    for (long j = i + 1; j < obs.size(); ++j) {
      const Eigen::VectorXd rj = average_ranks(obs.data.col(j));
      double mean = 0.0, sq = 0.0;
      for (long k = 0; k < m; ++k) {
        const double d = std::fabs(ri(k) - rj(k)) / (m + 1);
        mean += d;
        sq += d * d;
      }
      mean /= m;
      const double sd = std::sqrt(std::max(sq / m - mean * mean, 0.0));
      const double nu_f = mean / 2.0;
      const double se_theta = 4.0 / std::pow(1.0 - 2.0 * nu_f, 2) * (sd / (2.0 * std::sqrt(m)));
      const Eigen::Vector2d h(obs.locations[i].x - obs.locations[j].x,
                              obs.locations[i].y - obs.locations[j].y);
      const double truth = model.theta(corr_stationary(a, 1.0, h));
      CHECK(std::fabs(theta.theta(i, j) - truth) <= std::max(3.0 * se_theta, 5e-3));
    }
  }
}

TEST_CASE("max-stability under componentwise maxima") {
  const GlobalParams g{3.0, 1.0};
  const ParameterField field = small_constant_field(1.5, 0.0, 0.0, g, 2, 1.0);
  const long m = 1500;
  const int k = 10;
  const ObservationSet pool = max_stable_sample(field, true, m * k, 2024u);
  const long n = pool.size();
  for (long c = 0; c < n; ++c) {
    std::vector<double> rescaled(m);
    for (long i = 0; i < m; ++i) {
      double mx = 0.0;
      for (int j = 0; j < k; ++j) mx = std::max(mx, pool.data(i * k + j, c));
      rescaled[i] = mx / k;
    }
    CHECK(ks_unit_frechet(rescaled) < ks_critical_1pct(m));
  }
}

TEST_CASE("non-stationary sampler with constant field equals the stationary one") {
  const GlobalParams g{5.0, 1.0};
  const ParameterField field = small_constant_field(2.0, 1.0, M_PI / 4.0, g, 3, 1.0);
  CHECK(field.constant());
  const ObservationSet a = max_stable_sample(field, true, 40, 5u);
  const ObservationSet b = max_stable_sample(field, false, 40, 5u);
  CHECK((a.data - b.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("seed determinism of the max-stable sampler") {
  const GlobalParams g{5.0, 1.0};
  const ParameterField field = small_constant_field(2.0, 0.5, 0.3, g, 3, 1.0);
  const ObservationSet a = max_stable_sample(field, true, 25, 123u);
  const ObservationSet b = max_stable_sample(field, true, 25, 123u);
  const ObservationSet c = max_stable_sample(field, true, 25, 124u);
  CHECK((a.data - b.data).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.data - c.data).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("non-stationary extremal coefficients match the kernel correlation") {
  // Example-1 style variation on a horizontal strip; madogram estimates
  // should track theta(rho) under the kernel-convolution correlation.
  const GlobalParams g{5.0, 1.0};
  const GridSpec grid{-5.0, 5.0, 0.0, 0.0, 2.5};
  const ParameterField field = build_parameter_field(FieldPreset::example1, grid, g);
  const long m = 4000;
  const ObservationSet obs = max_stable_sample(field, false, m, 909u);
  const ThetaMatrix est = fmadogram_theta_matrix(obs);
  const ExtremalT model(g);
  std::vector<AnisotropyMatrix> mats;
  for (const auto& p : field.params) mats.push_back(build_matrix(p));
  for (long i = 0; i < obs.size(); ++i) {
    for (long j = i + 1; j < obs.size(); ++j) {
      const double rho = corr_nonstationary(mats[i], mats[j], g.alpha, field.locations[i],
                                            field.locations[j]);
      CHECK(std::fabs(est.theta(i, j) - model.theta(rho)) < 0.06);
    }
  }
}
