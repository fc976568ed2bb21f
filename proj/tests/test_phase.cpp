#include <gtest/gtest.h>

#include <cmath>

#include "gen.hpp"
#include "oscfrac/phase.hpp"

using namespace oscfrac;

namespace {

PolynomialPhase poly1(std::initializer_list<std::pair<int, double>> terms) {
  PolynomialPhase p(1);
  for (auto [k, c] : terms) p.add_term({k}, c);
  return p;
}

}  // namespace

TEST(Phase, ZeroCoefficientsAreDropped) {
  PolynomialPhase p(2);
  p.add_term({2, 0}, 1.0).add_term({2, 0}, -1.0).add_term({0, 0}, 3.0);
  EXPECT_EQ(p.terms().size(), 1u);
  EXPECT_DOUBLE_EQ(p.constant_term(), 3.0);
  EXPECT_THROW(p.add_term({1}, 1.0), InputError);
  EXPECT_THROW(p.add_term({-1, 2}, 1.0), InputError);
}

TEST(Phase, EvalExamples) {
  EXPECT_DOUBLE_EQ(eval_phase(poly1({{2, 1}, {0, 1}}), {0.0}), 1.0);
  EXPECT_DOUBLE_EQ(eval_phase(poly1({{3, 1}, {0, 1}}), {2.0}), 9.0);
  PolynomialPhase f(2);
  f.add_term({2, 0}, 1).add_term({0, 3}, 1).add_term({0, 0}, 1);
  EXPECT_DOUBLE_EQ(eval_phase(f, {1.0, 1.0}), 3.0);
  EXPECT_THROW(eval_phase(f, {1.0}), InputError);
}

TEST(Phase, DerivativeExamples) {
  auto d = partial_derivative(poly1({{2, 1}, {0, 1}}), 0);
  EXPECT_EQ(d, poly1({{1, 2}}));
  PolynomialPhase f(2);
  f.add_term({5, 0}, 1).add_term({0, 7}, 1).add_term({0, 0}, 1);
  PolynomialPhase expect(2);
  expect.add_term({0, 6}, 7);
  EXPECT_EQ(partial_derivative(f, 1), expect);
  EXPECT_TRUE(partial_derivative(poly1({{0, 4}}), 0).is_zero());
  EXPECT_THROW(partial_derivative(f, 2), InputError);
}

TEST(Phase, CriticalOrderExamples) {
  EXPECT_EQ(critical_order_1d(poly1({{2, 1}, {0, 1}})).s, 2);
  EXPECT_EQ(critical_order_1d(poly1({{3, 1}, {0, 1}})).s, 3);
  EXPECT_EQ(critical_order_1d(poly1({{5, 1}, {7, 1}, {0, 1}})).s, 5);
  EXPECT_THROW(critical_order_1d(poly1({{1, 1}, {2, 1}})), InputError);
  EXPECT_THROW(critical_order_1d(poly1({{0, 1}})), InputError);
}

TEST(Phase, AmplitudeExamples) {
  AmplitudeSpec a{1, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(eval_amplitude(a, {0.0}), 1.0);
  EXPECT_DOUBLE_EQ(eval_amplitude(a, {1.0}), 0.0);
  EXPECT_DOUBLE_EQ(eval_amplitude(a, {-1.5}), 0.0);
  EXPECT_NEAR(eval_amplitude(a, {0.5}), std::exp(1.0 - 4.0 / 3.0), 1e-15);
  EXPECT_NEAR(eval_amplitude(a, {0.5}), 0.71653, 1e-5);
  AmplitudeSpec bad{1, -1.0, 1.0};
  EXPECT_THROW(bad.validate(), InputError);
}

TEST(Phase, IsolatedCriticalPointExamples) {
  AmplitudeSpec a1{1, 1.0, 1.0};
  EXPECT_TRUE(verify_isolated_critical_point(poly1({{2, 1}, {0, 1}}), a1).pass);

  AmplitudeSpec a2{1, 2.0, 1.0};
  auto rep = verify_isolated_critical_point(poly1({{3, 1}, {1, -3}, {0, 1}}), a2);
  ASSERT_FALSE(rep.pass);
  EXPECT_NEAR(std::abs(rep.witness[0]), 1.0, 1e-8);

  PolynomialPhase f(2);
  f.add_term({2, 0}, 1).add_term({0, 3}, 1).add_term({0, 0}, 1);
  EXPECT_TRUE(verify_isolated_critical_point(f, AmplitudeSpec{2, 1.0, 1.0}).pass);

  PolynomialPhase g(2);  // gradient vanishes on the circle x^2 + y^2 = 1/4
  g.add_term({4, 0}, 1).add_term({2, 2}, 2).add_term({0, 4}, 1).add_term({2, 0}, -0.5).add_term({0, 2}, -0.5);
  EXPECT_FALSE(verify_isolated_critical_point(g, AmplitudeSpec{2, 1.0, 1.0}).pass);
}

TEST(PhaseProperty, DerivativeMatchesCentralDifference) {
  testgen::Gen gen(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(1, 3);
    const auto f = gen.polynomial(n, gen.integer(1, 6), 6);
    std::vector<double> x(n);
    for (auto& v : x) v = gen.uniform(-1.0, 1.0);
    for (int axis = 0; axis < n; ++axis) {
      const auto df = partial_derivative(f, axis);
      const double d = eval_phase(df, x);
      const double h = 1e-5;
      auto xp = x, xm = x;
      xp[axis] += h;
      xm[axis] -= h;
      const double fd = (eval_phase(f, xp) - eval_phase(f, xm)) / (2 * h);
      // scale by the size of the derivative's terms so cancellation is not penalized
      double scale = 0.0;
      for (const auto& [k, c] : df.terms()) {
        double m = std::abs(c);
        for (int i = 0; i < n; ++i) m *= ipow(std::abs(x[i]), k[i]);
        scale += m;
      }
      EXPECT_LE(std::abs(fd - d), 1e-6 * std::max(scale, 1.0)) << "trial " << trial;
    }
  }
}

TEST(PhaseProperty, AmplitudeIsNonNegativeAndSupported) {
  testgen::Gen gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = gen.integer(1, 3);
    AmplitudeSpec a{n, gen.uniform(0.1, 3.0), gen.uniform(0.1, 5.0)};
    std::vector<double> x(n);
    double r2 = 0.0;
    for (auto& v : x) {
      v = gen.uniform(-4.0, 4.0);
      r2 += v * v;
    }
    const double val = eval_amplitude(a, x);
    EXPECT_GE(val, 0.0);
    if (r2 >= a.radius * a.radius) EXPECT_EQ(val, 0.0);
    EXPECT_LE(val, a.value_at_origin);
    EXPECT_EQ(eval_amplitude(a, std::vector<double>(n, 0.0)), a.value_at_origin);
  }
}

TEST(PhaseProperty, CriticalOrderOfShiftedMonomial) {
  testgen::Gen gen(3);
  for (int s = 2; s <= 12; ++s)
    for (int trial = 0; trial < 10; ++trial) {
      PolynomialPhase p(1);
      p.add_term({s}, gen.uniform(0.1, 3.0)).add_term({0}, gen.uniform(-5.0, 5.0));
      EXPECT_EQ(critical_order_1d(p).s, s);
    }
}

TEST(PhaseProperty, RepeatedDifferentiationVanishes) {
  testgen::Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(1, 3);
    auto f = gen.polynomial(n, gen.integer(1, 5), 5);
    const int steps = n * 5 + 1;
    for (int i = 0; i < steps; ++i) f = partial_derivative(f, i % n);
    EXPECT_TRUE(f.is_zero());
  }
}
