#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "oscfrac/asymptotics.hpp"
#include "oscfrac/fractal.hpp"
#include "oscfrac/generators.hpp"
#include "oscfrac/windows.hpp"

namespace oscfrac {

// Synthetic sets with known dimension and content used to calibrate the
// estimators.
enum class ZooFamily { chirp, spiral, astring };

inline const char* to_string(ZooFamily f) {
  switch (f) {
    case ZooFamily::chirp: return "chirp";
    case ZooFamily::spiral: return "spiral";
    case ZooFamily::astring: return "a-string";
  }
  return "chirp";
}

struct ZooCase {
  ZooFamily family = ZooFamily::chirp;
  double alpha = 0.5;  // chirp amplitude exponent, spiral decay exponent
  double beta = 1.0;   // chirp frequency exponent
  double a = 1.0;      // a-string exponent
  double m = 1.0;      // spiral scale
  int l = 0;           // log power
  bool check_dimension = true;

  std::string name() const {
    char buf[96];
    switch (family) {
      case ZooFamily::chirp: std::snprintf(buf, sizeof buf, "chirp(a=%.4g,b=%.4g,l=%d)", alpha, beta, l); break;
      case ZooFamily::spiral: std::snprintf(buf, sizeof buf, "spiral(a=%.4g,m=%.4g,l=%d)", alpha, m, l); break;
      case ZooFamily::astring: std::snprintf(buf, sizeof buf, "a-string(a=%.4g)", a); break;
    }
    return buf;
  }

  double expected_dimension() const {
    switch (family) {
      case ZooFamily::chirp: return 2.0 - (alpha + 1.0) / (beta + 1.0);
      case ZooFamily::spiral: return 2.0 / (1.0 + alpha);
      case ZooFamily::astring: return 1.0 / (1.0 + a);
    }
    return 0.0;
  }

  // Known content, only for spirals without log factor.
  std::optional<double> expected_content() const {
    if (family == ZooFamily::spiral && l == 0 && alpha < 1.0) return spiral_content(alpha, m);
    return std::nullopt;
  }

  std::optional<ContentVerdict> expected_verdict() const {
    if (family == ZooFamily::astring) return std::nullopt;
    return l == 0 ? ContentVerdict::nondegenerate : ContentVerdict::degenerate_infinity;
  }
};

struct ZooSettings {
  double spiral_phi_max = 600.0 * std::numbers::pi;
  double chirp_t_min_beta1 = 1e-3;  // beta <= 1
  double chirp_t_min_beta2 = 1e-2;  // beta > 1
  double astring_eps_max = 2e-2;
  double astring_eps_min = 2e-5;
  int grid_count = kDefaultGridCount;
  int offsets = 4;
  std::uint64_t seed = 1;
  double dim_tolerance = 0.03;
  double content_tolerance = 0.10;

  double chirp_t_min(double beta) const { return beta <= 1.0 ? chirp_t_min_beta1 : chirp_t_min_beta2; }
};

struct ZooResult {
  ZooCase zoo;
  ScaleWindow window;
  std::size_t points = 0;
  DimensionEstimate dimension;
  std::optional<ContentEstimate> content;
  bool dimension_pass = true;
  bool content_pass = true;
  bool verdict_pass = true;

  bool pass() const { return dimension_pass && content_pass && verdict_pass; }
};

// Chirps and spirals with l in {0, 1}, plus two a-strings.
inline std::vector<ZooCase> default_zoo() {
  std::vector<ZooCase> z;
  for (auto [al, be] : {std::pair{0.5, 1.0}, std::pair{1.0 / 3.0, 1.0}, std::pair{0.5, 2.0}})
    for (int l : {0, 1}) {
      ZooCase c;
      c.family = ZooFamily::chirp;
      c.alpha = al;
      c.beta = be;
      c.l = l;
      c.check_dimension = l == 0;
      z.push_back(c);
    }
  for (double al : {1.0 / 3.0, 0.5, 2.0 / 3.0})
    for (int l : {0, 1}) {
      ZooCase c;
      c.family = ZooFamily::spiral;
      c.alpha = al;
      c.l = l;
      c.check_dimension = l == 0;
      z.push_back(c);
    }
  for (double a : {1.0, 2.0}) {
    ZooCase c;
    c.family = ZooFamily::astring;
    c.a = a;
    z.push_back(c);
  }
  return z;
}

inline ZooResult run_zoo_case(const ZooCase& c, const ZooSettings& s = {}) {
  ZooResult r;
  r.zoo = c;
  Polyline poly;
  switch (c.family) {
    case ZooFamily::chirp: {
      const double t_min = s.chirp_t_min(c.beta);
      poly = gen_chirp(c.alpha, c.beta, c.l, t_min);
      r.window = chirp_window(c.beta, t_min, poly);
      break;
    }
    case ZooFamily::spiral: {
      const double start = default_spiral_start(c.alpha, c.l);
      poly = gen_spiral(c.alpha, c.m, c.l, s.spiral_phi_max, start);
      r.window = spiral_window([&](double phi) { return spiral_radius(c.alpha, c.m, c.l, phi); }, start,
                               s.spiral_phi_max, poly);
      break;
    }
    case ZooFamily::astring: {
      poly = gen_astring(c.a, s.astring_eps_min);
      r.window.eps_max = s.astring_eps_max;
      r.window.eps_min = s.astring_eps_min;
      r.window.rule = "fixed";
      break;
    }
  }
  r.points = poly.size();
  const auto grid = window_grid(r.window, s.grid_count);
  const auto counts = box_count(poly, grid, s.offsets, s.seed);
  r.dimension = c.family == ZooFamily::astring ? estimate_dimension(counts.epsilons, counts.counts)
                                               : estimate_dimension_corrected(counts.epsilons, counts.counts);
  const double d = c.expected_dimension();
  if (c.check_dimension) r.dimension_pass = std::abs(r.dimension.d_hat - d) <= s.dim_tolerance;
  if (c.family != ZooFamily::astring) {
    r.content = estimate_content(poly, d, grid);
    if (const auto M = c.expected_content())
      r.content_pass = std::abs(r.content->M_hat - *M) <= s.content_tolerance * *M;
    if (const auto v = c.expected_verdict()) r.verdict_pass = r.content->verdict == *v;
  }
  return r;
}

}  // namespace oscfrac
