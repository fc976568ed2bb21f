#include <gtest/gtest.h>

#include <stdexcept>

#include "oscfrac/rational.hpp"

using oscfrac::Rational;

TEST(Rational, ReducesAndNormalizesSign) {
  Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(Rational(0, 5).den(), 1);
}

TEST(Rational, Arithmetic) {
  EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
  EXPECT_EQ(Rational(1, 2) - Rational(1, 3), Rational(1, 6));
  EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
  EXPECT_EQ(Rational(-1) / Rational(6, 5), Rational(-5, 6));
  EXPECT_EQ(-Rational(2, 7), Rational(-2, 7));
}

TEST(Rational, Ordering) {
  EXPECT_LT(Rational(-5, 6), Rational(-3, 4));
  EXPECT_GT(Rational(7, 5), Rational(1));
  EXPECT_EQ(std::max(Rational(1, 3), Rational(2, 5)), Rational(2, 5));
}

TEST(Rational, StringRoundTrip) {
  EXPECT_EQ(Rational(6, 5).to_string(), "6/5");
  EXPECT_EQ(Rational(2).to_string(), "2");
  EXPECT_EQ(Rational::parse(Rational(-7).to_string()), Rational(-7));
  EXPECT_EQ(Rational::parse("-5/6"), Rational(-5, 6));
  EXPECT_EQ(Rational::parse("3"), Rational(3));
  EXPECT_THROW(Rational::parse("1/0"), oscfrac::InputError);
  EXPECT_THROW(Rational::parse("x/2"), oscfrac::InputError);
  EXPECT_THROW(Rational::parse("1/2z"), oscfrac::InputError);
}

TEST(Rational, ErrorsInsteadOfRounding) {
  EXPECT_THROW(Rational(1, 0), std::domain_error);
  EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
  const Rational big(INT64_MAX / 2);
  EXPECT_THROW(big * big, std::overflow_error);
  EXPECT_DOUBLE_EQ(Rational(1, 3).to_double(), 1.0 / 3.0);
}
