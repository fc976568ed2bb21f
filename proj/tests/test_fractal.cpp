#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oscfrac/asymptotics.hpp"
#include "oscfrac/calibration.hpp"
#include "oscfrac/fractal.hpp"
#include "oscfrac/generators.hpp"
#include "oscfrac/windows.hpp"

using namespace oscfrac;

namespace {

constexpr double kPi = std::numbers::pi;

Polyline segment(double len) { return Polyline{{{0.0, 0.0}, {len, 0.0}}}; }

Polyline random_walk(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  Polyline p;
  Vec2 v{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    p.points.push_back(v);
    v.x += N(rng);
    v.y += N(rng);
  }
  return p;
}

double count_slope(const BoxCounts& c) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    lx.push_back(-std::log(c.epsilons[i]));
    ly.push_back(std::log(c.counts[i]));
  }
  return fit_line(lx, ly).slope;
}

}  // namespace

TEST(EpsilonGrid, Invariants) {
  const auto g = make_epsilon_grid(0.1, 1e-4, 10);
  EXPECT_NO_THROW(g.validate());
  EXPECT_NEAR(g.decades(), 3.0, 1e-12);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g.epsilons[i], g.epsilons[i - 1]);
  EXPECT_THROW(make_epsilon_grid(0.1, 1e-4, 7).validate(), InputError);
  EXPECT_THROW(make_epsilon_grid(0.1, 0.01, 10).validate(), InputError);
  EXPECT_THROW(make_epsilon_grid(1e-4, 0.1, 10), InputError);
}

TEST(BoxCount, SegmentHasSlopeOne) {
  const auto c = box_count(segment(1.0), make_epsilon_grid(0.05, 1e-4, 12));
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) EXPECT_NEAR(c.counts[i] * c.epsilons[i], 1.0, 2.5 * c.epsilons[i]);
  EXPECT_NEAR(count_slope(c), 1.0, 0.01);
  const auto d = estimate_dimension(c.epsilons, c.counts);
  EXPECT_NEAR(d.d_hat, 1.0, 0.03);
  EXPECT_THROW(box_count(segment(1.0), make_epsilon_grid(2.0, 1e-3, 10)), InputError);
  EXPECT_THROW(box_count(Polyline{{{0.0, 0.0}}}, make_epsilon_grid(0.1, 1e-3, 10)), InputError);
}

TEST(BoxCount, AStrings) {
  for (double a : {1.0, 2.0}) {
    const auto p = gen_astring(a, 2e-5);
    EXPECT_FALSE(p.segments);
    const auto c = box_count(p, make_epsilon_grid(2e-2, 2e-5, 16));
    EXPECT_NEAR(estimate_dimension(c.epsilons, c.counts).d_hat, 1.0 / (1.0 + a), 0.03) << a;
  }
}

TEST(BoxCount, PowerSpiral) {
  const double alpha = 0.5, phi_max = 600.0 * kPi, start = 2.0 * kPi;
  const auto p = gen_spiral(alpha, 1.0, 0, phi_max, start);
  const auto w = spiral_window([&](double phi) { return spiral_radius(alpha, 1.0, 0, phi); }, start, phi_max, p);
  const auto c = box_count(p, window_grid(w));
  EXPECT_NEAR(estimate_dimension_corrected(c.epsilons, c.counts).d_hat, 4.0 / 3.0, 0.03);
}

TEST(EstimateDimension, ExactPowerLaw) {
  const auto g = make_epsilon_grid(0.1, 1e-4, 12);
  std::vector<double> n;
  for (double e : g.epsilons) n.push_back(std::pow(e, -1.25));
  const auto d = estimate_dimension(g.epsilons, n);
  EXPECT_NEAR(d.d_hat, 1.25, 1e-6);
  EXPECT_FALSE(d.inconclusive);
  EXPECT_NEAR(d.r_squared, 1.0, 1e-12);
  EXPECT_EQ(d.points_used, g.size());
  const auto dc = estimate_dimension_corrected(g.epsilons, n);
  EXPECT_NEAR(dc.d_hat, 1.25, 1e-6);
}

TEST(EstimateDimension, NoPlateauIsInconclusive) {
  const auto g = make_epsilon_grid(0.1, 1e-4, 10);
  std::vector<double> n;
  // local slopes alternate between 0.5 and 1.5
  double v = 10.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    n.push_back(v);
    if (i + 1 < g.size()) v *= std::pow(g.epsilons[i] / g.epsilons[i + 1], i % 2 ? 0.5 : 1.5);
  }
  EXPECT_TRUE(estimate_dimension(g.epsilons, n).inconclusive);
  EXPECT_THROW(estimate_dimension({0.1, 0.01}, {1.0, 2.0}), InputError);
}

TEST(EstimateDimension, ChirpAndRectifiable) {
  const auto chirp = gen_chirp(0.5, 1.0, 0, 1e-3);
  const auto g = window_grid(chirp_window(1.0, 1e-3, chirp));
  const auto c = box_count(chirp, g);
  EXPECT_NEAR(estimate_dimension(c.epsilons, c.counts).d_hat, 1.25, 0.03);
  Polyline arc;
  for (int i = 0; i <= 4000; ++i) arc.points.push_back({std::cos(3.0 * i / 4000), std::sin(3.0 * i / 4000)});
  const auto ca = box_count(arc, make_epsilon_grid(0.05, 1e-4, 12));
  EXPECT_NEAR(estimate_dimension(ca.epsilons, ca.counts).d_hat, 1.0, 0.03);
}

TEST(FiniteSizeFit, RecoversSyntheticParameters) {
  const auto g = make_epsilon_grid(0.05, 1e-4, 20);
  std::vector<double> area;
  for (double e : g.epsilons) area.push_back(3.0 * std::pow(e, 2.0 - 1.3) + 0.5 * e + 0.01);
  const auto f = fit_finite_size(g.epsilons, area, 2.0, 1.0, 2.0);
  EXPECT_TRUE(f.valid);
  EXPECT_NEAR(f.d, 1.3, 1e-4);
  EXPECT_NEAR(f.a, 3.0, 1e-2);
  EXPECT_NEAR(f.b, 0.5, 1e-2);
  EXPECT_NEAR(f.c, 0.01, 1e-4);
}

TEST(Sausage, ClosedForms) {
  for (double e : {0.01, 0.03, 0.1}) {
    EXPECT_NEAR(sausage_area(segment(1.0), e) / (2.0 * e + kPi * e * e), 1.0, 0.02);
    Polyline pt{{{0.3, 0.4}}};
    EXPECT_NEAR(sausage_area(pt, e) / (kPi * e * e), 1.0, 0.02);
    Polyline square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}};
    EXPECT_NEAR(sausage_area(square, e) / (8.0 * e + (kPi - 4.0) * e * e), 1.0, 0.02);
  }
  EXPECT_THROW(sausage_area(segment(1.0), 0.0), InputError);
}

TEST(Sausage, SpiralRatioStaysInBand) {
  const double alpha = 0.5, d = 4.0 / 3.0;
  const auto p = gen_spiral(alpha, 1.0, 0, 600.0 * kPi);
  const double M = spiral_content(alpha, 1.0);
  for (double e : {3e-3, 1e-3, 5e-4}) {
    const double ratio = sausage_area(p, e) / std::pow(e, 2.0 - d);
    EXPECT_GT(ratio, 0.5 * M) << e;
    EXPECT_LT(ratio, 1.5 * M) << e;
  }
}

TEST(Content, SegmentAtDimensionOne) {
  const auto c = estimate_content(segment(1.0), 1.0, make_epsilon_grid(0.01, 1e-4, 10));
  EXPECT_NEAR(c.M_hat, 2.0, 0.05);
  EXPECT_EQ(c.verdict, ContentVerdict::nondegenerate);
  EXPECT_EQ(c.epsilons.size(), c.areas.size());
  for (double m : c.corrected_ratios) EXPECT_GE(m, 0.0);
}

TEST(Content, PowerSpiralMatchesFormula) {
  const auto r = run_zoo_case([] {
    ZooCase z;
    z.family = ZooFamily::spiral;
    z.alpha = 0.5;
    return z;
  }());
  ASSERT_TRUE(r.content);
  EXPECT_NEAR(r.content->M_hat / spiral_content(0.5, 1.0), 1.0, 0.10);
  EXPECT_NEAR(spiral_content(0.5, 1.0), 6.97, 0.01);
  EXPECT_EQ(r.content->verdict, ContentVerdict::nondegenerate);
}

TEST(Content, LogChirpIsDegenerate) {
  ZooCase z;
  z.family = ZooFamily::chirp;
  z.alpha = 0.5;
  z.beta = 1.0;
  z.l = 1;
  const auto r = run_zoo_case(z);
  ASSERT_TRUE(r.content);
  EXPECT_EQ(r.content->verdict, ContentVerdict::degenerate_infinity);
  z.l = 0;
  EXPECT_EQ(run_zoo_case(z).content->verdict, ContentVerdict::nondegenerate);
}

TEST(Content, SyntheticLogFactor) {
  const auto g = make_epsilon_grid(1e-2, 1e-6, 16);
  const double d = 1.25;
  for (double l : {0.0, 1.0}) {
    std::vector<double> area;
    for (double e : g.epsilons) area.push_back(2.0 * std::pow(e, 2.0 - d) * std::pow(std::log(1.0 / e), l));
    const auto c = content_from_areas(g.epsilons, area, d, 1.0);
    EXPECT_NEAR(c.log_exponent_hat, l, 0.05) << l;
    EXPECT_EQ(c.verdict, l == 0.0 ? ContentVerdict::nondegenerate : ContentVerdict::degenerate_infinity);
  }
}

TEST(Content, VerdictThresholds) {
  EXPECT_EQ(classify_log_exponent(0.2), ContentVerdict::nondegenerate);
  EXPECT_EQ(classify_log_exponent(-0.25), ContentVerdict::nondegenerate);
  EXPECT_EQ(classify_log_exponent(0.4), ContentVerdict::inconclusive);
  EXPECT_EQ(classify_log_exponent(0.5), ContentVerdict::degenerate_infinity);
  EXPECT_EQ(classify_log_exponent(-0.7), ContentVerdict::degenerate_zero);
}

TEST(Generators, BoundaryCases) {
  const auto c = gen_chirp(1.0, 1.0, 0, 1e-3);
  const auto cc = box_count(c, window_grid(chirp_window(1.0, 1e-3, c)));
  EXPECT_NEAR(estimate_dimension_corrected(cc.epsilons, cc.counts).d_hat, 1.0, 0.05);
  const auto s = gen_spiral(1.0, 1.0, 0, 600.0 * kPi);
  const auto sc = box_count(s, make_epsilon_grid(1e-2, 1e-4, 12));
  // r = 1/phi has length growing like log(1/eps), so N(eps) ~ eps^-1 log(1/eps)
  // and the local slope is 1 + 1/log(1/eps) at the geometric mid-scale
  EXPECT_NEAR(estimate_dimension(sc.epsilons, sc.counts).d_hat, 1.0 + 1.0 / std::log(1e3), 0.03);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double a0 = std::atan2(s.points[i - 1].y, s.points[i - 1].x);
    const double a1 = std::atan2(s.points[i].y, s.points[i].x);
    EXPECT_LE(std::remainder(a1 - a0, 2.0 * kPi), kPi / 64.0 + 1e-12);
  }
  EXPECT_THROW(gen_chirp(2.0, 1.0, 0, 1e-3), InputError);
  EXPECT_THROW(gen_spiral(0.5, 1.0, 0, 100.0, 2.0), InputError);
  EXPECT_THROW(gen_astring(-1.0, 1e-3), InputError);
  EXPECT_THROW(gen_chirp(0.5, 3.0, 0, 1e-6, 1000, 1000), BudgetError);
}

TEST(SpiralRadial, CriticalAngleScaling) {
  std::vector<double> phi, r;
  for (double x = 2.0 * kPi; x <= 2000.0 * kPi; x += kPi / 64.0) {
    phi.push_back(x);
    r.push_back(std::pow(x, -0.5));
  }
  const auto rep = spiral_radial_analysis(phi, r, make_epsilon_grid(1e-3, 1e-5, 8), 512);
  // phi2 ~ (pi / (2 eps))^(2/3) from 2 pi alpha phi^(-alpha-1) = 2 eps
  for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
    const double expect = std::pow(kPi * 0.5 / rep.epsilons[i], 2.0 / 3.0);
    EXPECT_NEAR(rep.phi2[i] / expect, 1.0, 0.05);
    EXPECT_GE(rep.nucleus_area[i] + rep.tail_area[i], rep.radial_area[i] - 4.0 * rep.epsilons[i] * rep.epsilons[i]);
  }
}

TEST(SpiralRadial, LogSpiralDiverges) {
  const double alpha = 0.5, d = 4.0 / 3.0;
  auto ratio_trend = [&](int l) {
    std::vector<double> phi, r;
    const double start = default_spiral_start(alpha, l);
    for (double x = start; x <= 2000.0 * kPi; x += kPi / 64.0) {
      phi.push_back(x);
      r.push_back(spiral_radius(alpha, 1.0, l, x));
    }
    const auto rep = spiral_radial_analysis(phi, r, make_epsilon_grid(3e-3, 3e-5, 8), 512);
    return (rep.radial_area.back() / std::pow(rep.epsilons.back(), 2.0 - d)) /
           (rep.radial_area.front() / std::pow(rep.epsilons.front(), 2.0 - d));
  };
  EXPECT_NEAR(ratio_trend(0), 1.0, 0.15);
  EXPECT_GT(ratio_trend(1), 1.3);
}

TEST(SpiralRadial, ConstantRadiusAndErrors) {
  std::vector<double> phi, r;
  for (int i = 0; i <= 2000; ++i) {
    phi.push_back(3.0 + 0.01 * i);
    r.push_back(1.0);
  }
  const auto rep = spiral_radial_analysis(phi, r, make_epsilon_grid(1e-2, 1e-4, 8), 256);
  for (double p2 : rep.phi2) EXPECT_EQ(p2, phi.front());
  r[10] = 2.0;
  EXPECT_THROW(spiral_radial_analysis(phi, r, make_epsilon_grid(1e-2, 1e-4, 8)), InputError);
}

// Properties with seeded generators.

TEST(FractalProperty, ScaleCovarianceIsExact) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_walk(rng, 200);
    const auto g = make_epsilon_grid(1.0, 0.01, 8);
    const double lambda = std::ldexp(1.0, static_cast<int>(rng() % 9) - 4);
    EpsilonGrid gs = g;
    for (auto& e : gs.epsilons) e *= lambda;
    const auto a = box_count(p, g, 4, 5);
    const auto b = box_count(scaled(p, lambda), gs, 4, 5);
    EXPECT_EQ(a.counts, b.counts) << lambda;
  }
}

TEST(FractalProperty, SausageMonotoneInEps) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_walk(rng, 100);
    double prev = 0.0;
    for (double e : {0.01, 0.02, 0.05, 0.1, 0.3, 1.0}) {
      const double a = sausage_area(p, e);
      EXPECT_GE(a, prev);
      prev = a;
    }
  }
}

TEST(FractalProperty, NucleusAndTailCoverRadialNeighbourhood) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double alpha = 0.2 + 0.7 * U(rng), m = 0.5 + U(rng);
    const int l = static_cast<int>(rng() % 2);
    std::vector<double> phi, r;
    const double start = default_spiral_start(alpha, l);
    for (double x = start; x <= start + 300.0 * kPi; x += kPi / 64.0) {
      phi.push_back(x);
      r.push_back(spiral_radius(alpha, m, l, x));
    }
    const auto rep = spiral_radial_analysis(phi, r, make_epsilon_grid(1e-2, 1e-4, 8), 512);
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
      const double e = rep.epsilons[i];
      EXPECT_GE(rep.nucleus_area[i] + rep.tail_area[i], rep.radial_area[i] - 4.0 * e * e);
    }
  }
}

TEST(FractalProperty, CalibrationOnFastCases) {
  for (const auto& z : default_zoo()) {
    const bool fast = (z.family == ZooFamily::chirp && z.beta == 1.0 && z.l == 0) ||
                      (z.family == ZooFamily::spiral && z.l == 0 && z.alpha >= 0.5) ||
                      z.family == ZooFamily::astring;
    if (!fast) continue;
    const auto r = run_zoo_case(z);
    EXPECT_NEAR(r.dimension.d_hat, z.expected_dimension(), 0.03) << z.name();
    EXPECT_TRUE(r.pass()) << z.name();
  }
}
