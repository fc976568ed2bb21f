#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "oscfrac/quadrature.hpp"
#include "oscfrac/special.hpp"

using namespace oscfrac;

namespace {

// Gamma from the Euler product limit with Richardson-style tail handling:
// ln Gamma(x) via Stirling series after shifting x above 30.
double gamma_oracle(double x) {
  double shift = 0.0;
  while (x < 30.0) {
    shift -= std::log(x);
    x += 1.0;
  }
  const double pi = std::numbers::pi;
  const double x2 = x * x;
  const double series = 1.0 / (12 * x) - 1.0 / (360 * x * x2) + 1.0 / (1260 * x2 * x2 * x) -
                        1.0 / (1680 * x2 * x2 * x2 * x);
  return std::exp(shift + (x - 0.5) * std::log(x) - x + 0.5 * std::log(2 * pi) + series);
}

}  // namespace

TEST(Special, GammaExamples) {
  EXPECT_NEAR(gamma_function(0.5), std::sqrt(std::numbers::pi), 1e-12 * std::sqrt(std::numbers::pi));
  EXPECT_NEAR(gamma_function(5.0), 24.0, 1e-12);
  EXPECT_NEAR(gamma_function(4.0 / 3.0), 0.8929795115692492, 1e-12);
  EXPECT_NEAR(gamma_function(4.0 / 3.0), gamma_oracle(4.0 / 3.0), 1e-12);
  EXPECT_NEAR(gamma_function(-0.5), -2.0 * std::sqrt(std::numbers::pi), 1e-11);
  EXPECT_THROW(gamma_function(0.0), InputError);
  EXPECT_THROW(gamma_function(-3.0), InputError);
}

TEST(Special, GammaMatchesStirlingOracleOnRange) {
  for (double x = 0.1; x <= 30.0; x += 0.0731) {
    const double g = gamma_function(x);
    EXPECT_NEAR(g / gamma_oracle(x), 1.0, 1e-12) << x;
  }
}

TEST(Special, BetaExamples) {
  EXPECT_NEAR(beta_function(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(beta_function(0.5, 0.5), std::numbers::pi, 1e-12);
  // integral oracle with endpoint singularities
  auto f = [](double, double da, double db) { return std::pow(da, -0.5) * std::pow(db, -2.0 / 3.0); };
  const double ref = tanh_sinh(f, 0.0, 1.0, 1e-13).value;
  EXPECT_NEAR(beta_function(0.5, 1.0 / 3.0), ref, 1e-9);
  EXPECT_NEAR(beta_function(0.5, 1.0 / 3.0), 4.20654631597636278, 1e-12);
  EXPECT_THROW(beta_function(0.0, 1.0), InputError);
  EXPECT_THROW(beta_function(1.0, -2.0), InputError);
}

TEST(SpecialProperty, Recurrence) {
  testgen::Gen gen(17);
  for (int i = 0; i < 200; ++i) {
    const double x = gen.uniform(0.1, 20.0);
    EXPECT_NEAR(gamma_function(x + 1.0) / (x * gamma_function(x)), 1.0, 1e-11) << x;
  }
}

TEST(SpecialProperty, BetaSymmetric) {
  testgen::Gen gen(19);
  for (int i = 0; i < 200; ++i) {
    const double a = gen.uniform(0.05, 30.0), b = gen.uniform(0.05, 30.0);
    EXPECT_EQ(beta_function(a, b), beta_function(b, a));
  }
}

TEST(SpecialProperty, Factorials) {
  double f = 1.0;
  for (int n = 1; n <= 15; ++n) {
    if (n > 1) f *= (n - 1);
    EXPECT_NEAR(gamma_function(n) / f, 1.0, 1e-10) << n;
  }
}

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  for (int n = 1; n <= 20; ++n) {
    const auto& g = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(s, exact, 1e-13) << n << " " << deg;
    }
  }
}
