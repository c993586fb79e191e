#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "exreg/model.hpp"
#include "exreg/student_t.hpp"

using namespace exreg;

namespace {

// Closed-form Student-t CDF for even df, used as an independent oracle for
// the incomplete-beta implementation:
//   T_df(t) = 1/2 + (x/2) sum_j C(2j, j) / 4^j (1 - x^2)^j,  x = t/sqrt(df+t^2)
double t_cdf_even_df(double t, int df) {
  REQUIRE(df % 2 == 0);
  const double x = t / std::sqrt(df + t * t);
  double coeff = 1.0, term = 1.0, sum = 0.0;
  for (int j = 0; j < df / 2; ++j) {
    if (j > 0) {
      coeff *= (2.0 * j - 1.0) / (2.0 * j);
      term *= 1.0 - x * x;
    }
    sum += coeff * term;
  }
  return 0.5 + 0.5 * x * sum;
}

}  // namespace

TEST_CASE("anisotropy matrix from parameters") {
  const AnisotropyMatrix m1 = build_matrix({2.0, 0.0, 0.0});
  CHECK(m1.m(0, 0) == 0.0);
  CHECK(m1.m(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m1.m(1, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(m1.m(1, 1) == 0.0);

  const AnisotropyMatrix m2 = build_matrix({1.0, 1.0, M_PI / 2.0});
  CHECK((m2.m - Eigen::Matrix2d::Identity()).norm() < 1e-15);

  const AnisotropyMatrix m3 = build_matrix({2.0, 3.0, M_PI / 2.0});
  CHECK(m3.m(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m3.m(0, 1) == doctest::Approx(0.0));
  CHECK(m3.m(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(build_matrix({2.0, 0.0, M_PI / 4.0}), DegenerateMatrixError);
  CHECK_THROWS_AS(build_matrix({-1.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_matrix({1.0, -0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_matrix({1.0, 0.5, 3.5}), std::invalid_argument);
}

TEST_CASE("rotation-form matrix describes axis lengths directly") {
  const AnisotropyMatrix m = build_matrix_rotation_form({2.0, 1.0, 0.0});
  // Major axis along x with scale 1/(a+b), minor along y with 1/a.
  CHECK((m.m * Eigen::Vector2d(3.0, 0.0)).norm() == doctest::Approx(1.0));
  CHECK((m.m * Eigen::Vector2d(0.0, 2.0)).norm() == doctest::Approx(1.0));
}

TEST_CASE("stationary correlation") {
  const AnisotropyMatrix id = build_matrix({1.0, 1.0, M_PI / 2.0});
  CHECK(corr_stationary(id, 1.0, {0.0, 0.0}) == 1.0);
  CHECK(corr_stationary(id, 1.0, {1.0, 0.0}) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
  CHECK(corr_stationary(id, 2.0, {1.0, 1.0}) == doctest::Approx(0.1353352832366127).epsilon(1e-12));
}

TEST_CASE("non-stationary correlation reduces to stationary for equal matrices") {
  const AnisotropyMatrix a = build_matrix({2.0, 1.0, 0.7});
  const Location s1{0.3, -1.2}, s2{2.0, 0.4};
  const double ns = corr_nonstationary(a, a, 1.3, s1, s2);
  const double st = corr_stationary(a, 1.3, {s1.x - s2.x, s1.y - s2.y});
  CHECK(ns == st);  // bitwise delegation
  CHECK(corr_nonstationary(a, a, 1.3, s1, s1) == 1.0);
}

TEST_CASE("non-stationary correlation prefactor") {
  // Omega1 = I, Omega2 = 4I at zero lag: 16^(1/4) / sqrt(6.25) = 0.8.
  const AnisotropyMatrix a1 = build_matrix({1.0, 1.0, M_PI / 2.0});
  const AnisotropyMatrix a2 = build_matrix({2.0, 2.0, M_PI / 2.0});
  const Location s{1.0, 1.0};
  CHECK(corr_nonstationary(a1, a2, 1.0, s, s) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(corr_nonstationary(AnisotropyMatrix{Eigen::Matrix2d::Zero()}, a2, 1.0, s, s),
                  DegenerateMatrixError);
}

TEST_CASE("student-t cdf against closed forms") {
  CHECK(student_t_cdf(0.0, 6.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(student_t_cdf(std::sqrt(2.0), 2.0) ==
        doctest::Approx(0.8535533905932738).epsilon(1e-12));
  CHECK(student_t_cdf(1e8, 3.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(student_t_cdf(1.3, 6.0) == doctest::Approx(0.8793474126886069).epsilon(1e-12));
  CHECK(student_t_cdf(-0.7, 6.0) == doctest::Approx(0.2550716904753798).epsilon(1e-12));
  CHECK(student_t_cdf(2.25, 8.0) == doctest::Approx(0.9727163471000324).epsilon(1e-12));
  CHECK(student_t_cdf(0.9, 3.5) == doctest::Approx(0.7871408278968083).epsilon(1e-12));
  CHECK_THROWS_AS(student_t_cdf(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(student_t_cdf(1.0, -2.0), std::domain_error);

  // Sweep against the even-df finite sum on a grid.
  for (const int df : {2, 4, 6, 8, 12}) {
    for (double t = -8.0; t <= 8.0; t += 0.37) {
      CHECK(student_t_cdf(t, df) == doctest::Approx(t_cdf_even_df(t, df)).epsilon(1e-11));
    }
  }
  // Monotonicity.
  double prev = 0.0;
  for (double t = -30.0; t <= 30.0; t += 0.5) {
    const double v = student_t_cdf(t, 4.7);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("student-t pdf and derivative are consistent with the cdf") {
  const StudentT st(6.0);
  for (double t = -4.0; t <= 4.0; t += 0.61) {
    const double h = 1e-6;
    CHECK(st.pdf(t) ==
          doctest::Approx((st.cdf(t + h) - st.cdf(t - h)) / (2.0 * h)).epsilon(1e-7));
    CHECK(st.pdf_deriv(t) ==
          doctest::Approx((st.pdf(t + h) - st.pdf(t - h)) / (2.0 * h)).epsilon(1e-6));
  }
}

TEST_CASE("exponent function reference values") {
  const GlobalParams nu1{1.0, 1.0};
  CHECK(exponent_V(1.0, 1.0, 0.0, nu1) == doctest::Approx(1.7071067811865475).epsilon(1e-12));
  CHECK(exponent_V(2.0, 2.0, 0.0, nu1) == doctest::Approx(0.8535533905932738).epsilon(1e-12));
  CHECK(exponent_V(1.0, 1.0, 1.0 - 1e-12, nu1) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(exponent_V(1.0, 1.0, 1.0, nu1), std::domain_error);
  CHECK_THROWS_AS(exponent_V(-1.0, 1.0, 0.0, nu1), std::domain_error);
}

TEST_CASE("exponent homogeneity and marginal consistency") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uy(0.2, 5.0), urho(-0.9, 0.95), unu(1.0, 7.0);
  for (int i = 0; i < 200; ++i) {
    const GlobalParams g{unu(rng), 1.0};
    const ExtremalT model(g);
    const double y1 = uy(rng), y2 = uy(rng), rho = urho(rng);
    const double v = model.exponent(y1, y2, rho);
    for (const double c : {0.5, 2.0, 13.0}) {
      CHECK(std::fabs(c * model.exponent(c * y1, c * y2, rho) - v) <= 1e-10 * v);
    }
  }
  // V(y, Y) -> 1/y as Y -> infinity (unit Frechet margins).
  for (const double nu : {1.0, 3.0, 5.0, 7.0}) {
    const ExtremalT model(GlobalParams{nu, 1.0});
    for (const double rho : {0.0, 0.5, 0.9}) {
      for (const double y : {0.5, 1.0, 2.0}) {
        CHECK(model.exponent(y, 1e8, rho) == doctest::Approx(1.0 / y).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("analytic partials match central finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uy(0.3, 3.0), urho(-0.8, 0.95), unu(1.0, 7.0);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    const GlobalParams g{unu(rng), 1.0};
    const ExtremalT model(g);
    const double y1 = uy(rng), y2 = uy(rng), rho = urho(rng);
    const auto p = model.exponent_partials(y1, y2, rho);
    const double h1 = 3e-6 * y1, h2 = 3e-6 * y2;
    const double d1 = (model.exponent(y1 + h1, y2, rho) - model.exponent(y1 - h1, y2, rho)) /
                      (2.0 * h1);
    const double d2 = (model.exponent(y1, y2 + h2, rho) - model.exponent(y1, y2 - h2, rho)) /
                      (2.0 * h2);
    CHECK(p.dy1 == doctest::Approx(d1).epsilon(1e-5));
    CHECK(p.dy2 == doctest::Approx(d2).epsilon(1e-5));
    ++checked;
  }
  CHECK(checked == 120);

  // Symmetry on the diagonal and the scaling induced by homogeneity.
  const ExtremalT model(GlobalParams{3.0, 1.0});
  const auto diag = model.exponent_partials(1.4, 1.4, 0.3);
  CHECK(diag.dy1 == doctest::Approx(diag.dy2).epsilon(1e-13));
  const auto base = model.exponent_partials(0.9, 1.7, 0.4);
  const auto scaled = model.exponent_partials(1.8, 3.4, 0.4);
  CHECK(scaled.dy1 == doctest::Approx(base.dy1 / 4.0).epsilon(1e-10));
  CHECK(scaled.dy1dy2 == doctest::Approx(base.dy1dy2 / 8.0).epsilon(1e-10));
}

TEST_CASE("log density matches the mixed finite difference of exp(-V)") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uy(0.3, 3.0), urho(-0.8, 0.95), unu(1.0, 7.0);
  for (int i = 0; i < 100; ++i) {
    const GlobalParams g{unu(rng), 1.0};
    const ExtremalT model(g);
    const double y1 = uy(rng), y2 = uy(rng), rho = urho(rng);
    auto cdf = [&](double a, double b) { return std::exp(-model.exponent(a, b, rho)); };
    const double h1 = 2e-4 * y1, h2 = 2e-4 * y2;
    const double fd = (cdf(y1 + h1, y2 + h2) - cdf(y1 + h1, y2 - h2) - cdf(y1 - h1, y2 + h2) +
                       cdf(y1 - h1, y2 - h2)) /
                      (4.0 * h1 * h2);
    const double f = std::exp(model.log_density(y1, y2, rho));
    CHECK(f == doctest::Approx(fd).epsilon(1e-4));
  }
  // Explicit spot check from the mixed difference at fixed inputs.
  const ExtremalT model(GlobalParams{5.0, 1.0});
  auto cdf = [&](double a, double b) { return std::exp(-model.exponent(a, b, 0.5)); };
  const double h = 2e-4;
  const double fd = (cdf(1.3 + h, 0.7 + h) - cdf(1.3 + h, 0.7 - h) - cdf(1.3 - h, 0.7 + h) +
                     cdf(1.3 - h, 0.7 - h)) /
                    (4.0 * h * h);
  CHECK(std::exp(model.log_density(1.3, 0.7, 0.5)) == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("log density symmetry") {
  const ExtremalT model(GlobalParams{4.0, 1.0});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uy(0.2, 4.0), urho(-0.5, 0.95);
  for (int i = 0; i < 50; ++i) {
    const double y1 = uy(rng), y2 = uy(rng), rho = urho(rng);
    CHECK(model.log_density(y1, y2, rho) ==
          doctest::Approx(model.log_density(y2, y1, rho)).epsilon(1e-12));
  }
}

TEST_CASE("density integrates to the bivariate cdf") {
  const GlobalParams g{2.0, 1.0};
  const ExtremalT model(g);
  const double rho = 0.5, cap = 2.0, lo = 1e-3;
  // Composite Simpson on [lo, cap]^2; mass below lo is exp(-1000)-small.
  const int n = 200;  // intervals per axis, even
  const double h = (cap - lo) / n;
  auto weight = [&](int i) { return i == 0 || i == n ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0); };
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double y1 = lo + i * h, y2 = lo + j * h;
      acc += weight(i) * weight(j) * std::exp(model.log_density(y1, y2, rho));
    }
  }
  acc *= h * h / 9.0;
  CHECK(acc == doctest::Approx(std::exp(-model.exponent(cap, cap, rho))).epsilon(1e-3));
}

TEST_CASE("theoretical extremal coefficient") {
  const GlobalParams nu1{1.0, 1.0};
  CHECK(theta_theoretical(1.0, nu1) == 1.0);
  CHECK(theta_theoretical(0.0, nu1) == doctest::Approx(1.7071067811865475).epsilon(1e-9));
  const GlobalParams nu5{5.0, 1.0};
  CHECK(theta_theoretical(0.0, nu5) == doctest::Approx(1.9501747372194234).epsilon(1e-12));
  CHECK(theta_theoretical(0.5, nu5) == doctest::Approx(1.79296875).epsilon(1e-12));
  CHECK(theta_theoretical(0.5, nu5) < theta_theoretical(0.0, nu5));

  // Bounds and monotonicity on a grid.
  double prev = 2.1;
  for (double rho = -0.99; rho < 1.0; rho += 0.01) {
    const double t = theta_theoretical(rho, nu5);
    CHECK(t >= 1.0);
    CHECK(t <= 2.0);
    CHECK(t < prev);
    prev = t;
  }
  CHECK(invert_theta(theta_theoretical(0.37, nu5), nu5) == doctest::Approx(0.37).epsilon(1e-9));
}
