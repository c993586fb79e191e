#include <doctest.h>

#include <cmath>
#include <random>

#include "exreg/empirical.hpp"
#include "exreg/model.hpp"
#include "exreg/simulate.hpp"

using namespace exreg;

namespace {

ObservationSet make_raw(const Eigen::MatrixXd& data) {
  ObservationSet obs;
  obs.margins = Margins::raw;
  obs.data = data;
  obs.locations.resize(data.cols());
  for (long i = 0; i < data.cols(); ++i) obs.locations[i] = {static_cast<double>(i), 0.0};
  return obs;
}

}  // namespace

TEST_CASE("rank transform quantile arithmetic") {
  Eigen::MatrixXd data(3, 1);
  data << 0.2, 5.0, 1.1;
  const ObservationSet out = rank_frechet_transform(make_raw(data));
  CHECK(out.margins == Margins::unit_frechet);
  CHECK(out.data(0, 0) == doctest::Approx(0.7213475204444817).epsilon(1e-12));
  CHECK(out.data(1, 0) == doctest::Approx(3.476059496782207).epsilon(1e-12));
  CHECK(out.data(2, 0) == doctest::Approx(1.4426950408889634).epsilon(1e-12));
}

TEST_CASE("rank transform preserves order and is idempotent on tagged input") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd data(40, 2);
  for (long r = 0; r < 40; ++r)
    for (long c = 0; c < 2; ++c) data(r, c) = normal(rng);
  const ObservationSet out = rank_frechet_transform(make_raw(data));
  for (long c = 0; c < 2; ++c)
    for (long i = 0; i < 40; ++i)
      for (long j = 0; j < 40; ++j)
        if (data(i, c) < data(j, c)) CHECK(out.data(i, c) < out.data(j, c));

  const ObservationSet same = rank_frechet_transform(out);  // warns, returns input
  CHECK((same.data - out.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rank transform rejects constant columns and tiny samples") {
  Eigen::MatrixXd flat(5, 1);
  flat.setConstant(3.0);
  CHECK_THROWS_AS(rank_frechet_transform(make_raw(flat)), DegenerateColumnError);
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  CHECK_THROWS_AS(rank_frechet_transform(make_raw(one)), std::invalid_argument);
}

TEST_CASE("ties receive average ranks") {
  Eigen::VectorXd col(5);
  col << 2.0, 1.0, 2.0, 0.5, 9.0;
  const Eigen::VectorXd r = average_ranks(col);
  CHECK(r(0) == doctest::Approx(3.5));
  CHECK(r(2) == doctest::Approx(3.5));
  CHECK(r(1) == doctest::Approx(2.0));
  CHECK(r(3) == doctest::Approx(1.0));
  CHECK(r(4) == doctest::Approx(5.0));
}

TEST_CASE("madogram theta endpoints") {
  // Comonotone pair: identical ranks.
  Eigen::MatrixXd data(50, 2);
  for (long i = 0; i < 50; ++i) {
    data(i, 0) = std::exp(0.1 * i);
    data(i, 1) = 3.0 * std::exp(0.1 * i) + 1.0;  // strictly increasing transform
  }
  const ThetaMatrix t = fmadogram_theta_matrix(make_raw(data));
  CHECK(t.theta(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.theta(0, 0) == 1.0);
  CHECK(t.theta(1, 1) == 1.0);

  // Independent pair at m = 10000: E|U - V| = 1/3 so theta = 2.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u;
  Eigen::MatrixXd ind(10000, 2);
  for (long i = 0; i < 10000; ++i) {
    ind(i, 0) = u(rng);
    ind(i, 1) = u(rng);
  }
  const ThetaMatrix ti = fmadogram_theta_matrix(make_raw(ind));
  CHECK(ti.theta(0, 1) >= 1.93);
  CHECK(ti.theta(0, 1) <= 2.0);
}

TEST_CASE("madogram is rank invariant and symmetric") {
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> expo;
  Eigen::MatrixXd data(200, 3);
  for (long r = 0; r < 200; ++r) {
    const double shared = expo(rng);
    data(r, 0) = shared + 0.3 * expo(rng);
    data(r, 1) = shared + 0.7 * expo(rng);
    data(r, 2) = expo(rng);
  }
  const ThetaMatrix base = fmadogram_theta_matrix(make_raw(data));
  Eigen::MatrixXd warped = data;
  for (long r = 0; r < 200; ++r) warped(r, 0) = std::exp(3.0 * warped(r, 0));  // monotone
  const ThetaMatrix after = fmadogram_theta_matrix(make_raw(warped));
  CHECK((base.theta - after.theta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((base.theta - base.theta.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (long i = 0; i < 3; ++i)
    for (long j = 0; j < 3; ++j) {
      CHECK(base.theta(i, j) >= 1.0);
      CHECK(base.theta(i, j) <= 2.0);
    }
}

TEST_CASE("madogram consistency improves with sample size") {
  const GlobalParams g{5.0, 1.0};
  GridSpec grid{0.0, 2.0, 0.0, 2.0, 1.0};
  FieldOverrides ov;
  ov.a = 2.0;
  ov.b = 0.0;
  ov.gamma = 0.0;
  const ParameterField field = build_parameter_field(FieldPreset::constant, grid, g, ov);
  const AnisotropyMatrix a = build_matrix({2.0, 0.0, 0.0});
  const ExtremalT model(g);
  double prev_err = 1e9;
  for (const long m : {250L, 1000L, 4000L}) {
    const ObservationSet obs = max_stable_sample(field, true, m, 5150u);
    const ThetaMatrix est = fmadogram_theta_matrix(obs);
    double err = 0.0;
    long count = 0;
    for (long i = 0; i < obs.size(); ++i)
      for (long j = i + 1; j < obs.size(); ++j) {
        const Eigen::Vector2d h(obs.locations[i].x - obs.locations[j].x,
                                obs.locations[i].y - obs.locations[j].y);
        err += std::fabs(est.theta(i, j) - model.theta(corr_stationary(a, 1.0, h)));
        ++count;
      }
    err /= count;
    CHECK(err < prev_err);
    prev_err = err;
  }
}
