#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oscfrac/asymptotics.hpp"

using namespace oscfrac;

namespace {

constexpr double kPi = std::numbers::pi;

PolynomialPhase make(int n, std::initializer_list<std::pair<MultiIndex, double>> terms) {
  PolynomialPhase p(n);
  for (const auto& [k, c] : terms) p.add_term(k, c);
  return p;
}

// Leading coefficient of the 1D integral of exp(i tau x^p) near 0, from the
// Mellin integral of exp(i u) u^(1/p - 1).
cplx one_dim_monomial_constant(int p) {
  const double g = std::tgamma(1.0 + 1.0 / p);
  if (p % 2 == 0) return 2.0 * g * std::polar(1.0, kPi / (2.0 * p));
  return 2.0 * g * std::cos(kPi / (2.0 * p));
}

}  // namespace

TEST(Asymptotics, Predict1dExamples) {
  auto p2 = predict_1d({2}, 1.0, 1.0, 2.0);
  EXPECT_EQ(p2.curve_dim, Rational(4, 3));
  EXPECT_EQ(p2.osc_dim, Rational(5, 4));
  EXPECT_EQ(p2.beta, Rational(-1, 2));
  ASSERT_TRUE(p2.leading_coeff.has_value());
  EXPECT_NEAR(std::abs(*p2.leading_coeff), std::sqrt(kPi), 1e-14);
  EXPECT_NEAR(std::arg(*p2.leading_coeff), kPi / 4, 1e-14);
  EXPECT_EQ(p2.content_kind, ContentKind::value);
  EXPECT_NEAR(p2.content, 3.0 * std::cbrt(4.0) * kPi, 1e-12);
  EXPECT_NEAR(p2.content, 14.96, 5e-3);

  auto p3 = predict_1d({3}, 1.0, 1.0);
  EXPECT_EQ(p3.curve_dim, Rational(3, 2));
  EXPECT_EQ(p3.osc_dim, Rational(4, 3));
  EXPECT_EQ(p3.content_kind, ContentKind::unknown);

  auto flat = predict_1d({4}, 0.0, 1.0);
  EXPECT_TRUE(flat.rectifiable);
  EXPECT_EQ(flat.curve_dim, Rational(1));
  EXPECT_THROW(predict_1d({1}, 1.0, 1.0), InputError);
}

TEST(Asymptotics, Predict2dExamples) {
  auto d23 = newton_diagram(make(2, {{{2, 0}, 1}, {{0, 3}, 1}, {{0, 0}, 1}}));
  auto p = predict_2d(d23, 1.0);
  EXPECT_EQ(p.beta, Rational(-5, 6));
  EXPECT_EQ(p.curve_dim, Rational(12, 11));
  EXPECT_EQ(p.osc_dim, Rational(13, 12));
  EXPECT_FALSE(p.degenerate);

  auto d22 = newton_diagram(make(2, {{{2, 0}, 1}, {{0, 2}, 1}, {{0, 0}, 1}}));
  auto q = predict_2d(d22, 1.0);
  EXPECT_EQ(q.curve_dim, Rational(1));
  EXPECT_EQ(q.beta, Rational(-1));
  EXPECT_FALSE(q.degenerate);

  auto dv = newton_diagram(make(2, {{{2, 2}, 1}, {{6, 0}, 1}, {{0, 6}, 1}, {{0, 0}, 1}}));
  auto r = predict_2d(dv, 1.0);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.content_kind, ContentKind::degenerate);
  EXPECT_EQ(r.curve_dim, Rational(2, 3) * Rational(2));
}

TEST(Asymptotics, PredictNdExamples) {
  auto quad = newton_diagram(make(3, {{{2, 0, 0}, 1}, {{0, 2, 0}, 1}, {{0, 0, 2}, 1}, {{0, 0, 0}, 1}}));
  auto p = predict_nd(quad, 1.0, std::nullopt);
  EXPECT_TRUE(p.rectifiable);
  EXPECT_EQ(p.curve_dim, Rational(1));
  EXPECT_EQ(p.beta, Rational(-3, 2));

  auto quart = newton_diagram(make(3, {{{4, 0, 0}, 1}, {{0, 4, 0}, 1}, {{0, 0, 4}, 1}, {{0, 0, 0}, 1}}));
  auto q = predict_nd(quart, 1.0, 0);
  EXPECT_EQ(q.curve_dim, Rational(8, 7));
  EXPECT_FALSE(q.degenerate);
  auto r = predict_nd(quart, 1.0, 1);
  EXPECT_EQ(r.curve_dim, Rational(8, 7));
  EXPECT_TRUE(r.degenerate);
  EXPECT_THROW(predict_nd(quart, 1.0, std::nullopt), InputError);
}

TEST(Asymptotics, CausticExamples) {
  auto a2 = caustic_prediction({CausticFamily::A, 2, 1});
  EXPECT_EQ(a2.gamma, Rational(1, 6));
  EXPECT_EQ(a2.prediction.beta, Rational(-1, 3));
  EXPECT_EQ(a2.prediction.curve_dim, Rational(3, 2));
  auto a1 = caustic_prediction({CausticFamily::A, 1, 1});
  EXPECT_EQ(a1.prediction.beta, Rational(-1, 2));
  EXPECT_EQ(a1.prediction.curve_dim, Rational(4, 3));
  auto d4 = caustic_prediction({CausticFamily::D, 4, 2});
  EXPECT_EQ(d4.gamma, Rational(1, 3));
  EXPECT_EQ(d4.prediction.beta, Rational(-2, 3));
  EXPECT_EQ(d4.prediction.curve_dim, Rational(6, 5));
  EXPECT_EQ(d4.limit_curve_dim, Rational(4, 3));
  EXPECT_THROW(caustic_prediction({CausticFamily::D, 3, 2}), InputError);
  EXPECT_THROW(caustic_prediction({CausticFamily::A, 0, 1}), InputError);
}

TEST(Asymptotics, CausticLimitApproached) {
  for (int n = 1; n <= 4; ++n) {
    auto far = caustic_prediction({CausticFamily::A, 2000, n});
    if (far.prediction.rectifiable) continue;
    EXPECT_NEAR(far.prediction.curve_dim.to_double(), far.limit_curve_dim.to_double(), 2e-3);
  }
}

TEST(Asymptotics, GreenblattClosedFormMatchesNumeric) {
  for (auto [p, q] : {std::pair{2, 4}, {4, 4}, {2, 6}, {4, 6}, {6, 6}, {6, 2}}) {
    const auto closed = greenblatt_closed_form(p, q, 1.0);
    const auto numeric = greenblatt_coefficient(p, q, 1.0, Rational(-1, p) - Rational(1, q));
    EXPECT_LE(std::abs(numeric - closed) / std::abs(closed), 1e-6) << p << "," << q;
    EXPECT_NEAR(greenblatt_parts(p, q, 1.0).C0, 0.0, 1e-14);
  }
  EXPECT_NEAR(std::abs(greenblatt_closed_form(2, 4, 1.0)), 4 * 0.886227 * 0.906402, 1e-5);
  EXPECT_NEAR(std::abs(greenblatt_closed_form(2, 4, 1.0)), 3.2129, 5e-4);
  EXPECT_THROW(greenblatt_parts(2, 2, 1.0), InputError);
  EXPECT_THROW(greenblatt_coefficient(2, 4, 1.0, Rational(-1, 2)), InputError);
}

TEST(Asymptotics, GreenblattMixedParityMatchesProductOracle) {
  // For x^p + y^q the integral factors, so the leading coefficient is the
  // product of the two one-dimensional constants.
  for (auto [p, q] : {std::pair{2, 3}, {3, 2}, {3, 4}, {3, 3}, {2, 5}, {5, 4}, {3, 5}}) {
    const auto expect = one_dim_monomial_constant(p) * one_dim_monomial_constant(q);
    const auto got = greenblatt_coefficient(p, q, 1.0, Rational(-1, p) - Rational(1, q));
    EXPECT_LE(std::abs(got - expect) / std::abs(expect), 1e-7) << p << "," << q;
  }
  EXPECT_GT(greenblatt_parts(2, 3, 1.0).C0, 0.0);
}

TEST(Asymptotics, ContentFormulaConsistency) {
  // The two-dimensional content formula at beta = -1/2 reproduces the one-dimensional content.
  EXPECT_NEAR(content_from_coefficient(-0.5, std::sqrt(kPi), 1.0), 3.0 * std::cbrt(4.0) * kPi, 1e-12);
  for (double f0 : {0.5, 1.0, 3.0})
    EXPECT_NEAR(content_from_coefficient(-0.5, 1.3, f0) / content_from_c1(2, 1.3, f0), 1.0, 1e-12);
  EXPECT_THROW(content_from_coefficient(-1.0, 1.0, 1.0), InputError);
  EXPECT_THROW(content_from_coefficient(0.1, 1.0, 1.0), InputError);
}

TEST(Asymptotics, EvenExampleContentClosedForm) {
  for (auto [p, q] : {std::pair{2, 4}, {4, 4}, {4, 6}}) {
    const double b = -1.0 / p - 1.0 / q;
    const double expect = std::pow(4 * std::tgamma(1.0 / p + 1) * std::tgamma(1.0 / q + 1), 2 / (1 - b)) *
                          std::pow(-b, 2 * b / (1 - b)) * std::pow(kPi, (1 + b) / (1 - b)) * (1 - b) / (1 + b);
    EXPECT_NEAR(content_from_coefficient(b, greenblatt_closed_form(p, q, 1.0), 1.0) / expect, 1.0, 1e-12);
  }
}

TEST(AsymptoticsProperty, ContentHomogeneity) {
  for (int i = 1; i <= 40; ++i) {
    const double b = -1.0 + i / 41.0;
    for (double lambda : {0.3, 2.0, 7.5}) {
      const cplx a(0.7, -1.1);
      const double lhs = content_from_coefficient(b, lambda * a, 1.7);
      const double rhs = std::pow(lambda, 2 / (1 - b)) * content_from_coefficient(b, a, 1.7);
      EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
    }
  }
}

TEST(AsymptoticsProperty, DimensionsInRangeAndMonotone) {
  Rational prev_d(0);
  for (int den = 2; den <= 30; ++den)
    for (int num = den - 1; num >= 0; --num) {
      const Rational b(-num, den);
      const Rational d = curve_dimension(b), dp = oscillatory_dimension(b);
      EXPECT_GT(d, Rational(1));
      EXPECT_LE(d, Rational(2));
      EXPECT_GT(dp, Rational(1));
      EXPECT_LE(dp, Rational(2));
      EXPECT_EQ(d, Rational(2) / (Rational(1) - b));
      EXPECT_EQ(dp, (b + Rational(3)) / Rational(2));
    }
  for (int i = 0; i < 100; ++i) {
    const Rational b(-100 + i, 100);
    const Rational d = curve_dimension(b);
    EXPECT_GE(d, prev_d);
    prev_d = d;
  }
}

TEST(AsymptoticsProperty, AkMatchesOneDimensionalPrediction) {
  for (int k = 1; k <= 8; ++k) {
    const auto c = caustic_prediction({CausticFamily::A, k, 1}).prediction;
    const auto t = predict_1d({k + 1}, 1.0, 1.0);
    EXPECT_EQ(c.beta, t.beta);
    EXPECT_EQ(c.curve_dim, t.curve_dim);
    EXPECT_EQ(c.osc_dim, t.osc_dim);
  }
}

TEST(Asymptotics, PredictPhaseDispatch) {
  AmplitudeSpec a1{1, 1.0, 1.0};
  auto lin = predict_phase(make(1, {{{1}, 1}, {{0}, 2}}), a1);
  EXPECT_TRUE(lin.rectifiable);
  auto p = predict_phase(make(1, {{{2}, 1}, {{0}, 1}}), a1);
  EXPECT_NEAR(p.content, 3.0 * std::cbrt(4.0) * kPi, 1e-12);
  AmplitudeSpec a2{2, 1.0, 1.0};
  auto q = predict_phase(make(2, {{{2, 0}, 1}, {{0, 4}, 1}, {{0, 0}, 1}}), a2);
  EXPECT_EQ(q.curve_dim, Rational(8, 7));
  ASSERT_TRUE(q.leading_coeff.has_value());
  EXPECT_NEAR(std::abs(*q.leading_coeff), 3.2129, 5e-4);
  EXPECT_EQ(q.content_kind, ContentKind::value);
}
