#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "oscfrac/error.hpp"
#include "oscfrac/fractal.hpp"
#include "oscfrac/geometry.hpp"
#include "oscfrac/integral.hpp"

namespace oscfrac {

// Range of scales over which a truncated accumulating curve shows its
// asymptotic geometry. Above eps_max the outermost windings merge with the
// bulk of the curve; below eps_min the truncation (missing inner windings)
// dominates.
struct ScaleWindow {
  double eps_max = 0.0;
  double eps_min = 0.0;
  bool extended = false;  // eps_min lowered to reach the minimum span
  std::string rule;

  double decades() const { return std::log10(eps_max / eps_min); }
};

constexpr double kMinWindowDecades = 1.5;
constexpr int kDefaultGridCount = 16;

namespace detail {

inline ScaleWindow finish_window(double eps_max, double eps_min, std::string rule) {
  if (!(eps_max > 0.0) || !std::isfinite(eps_max)) throw InputError("scale window has no positive upper bound");
  ScaleWindow w;
  w.eps_max = eps_max;
  w.eps_min = eps_min > 0.0 ? eps_min : eps_max / 100.0;
  const double floor = eps_max * std::pow(10.0, -kMinWindowDecades);
  if (w.eps_min > floor) {
    w.eps_min = floor;
    w.extended = true;
  }
  w.rule = std::move(rule);
  return w;
}

inline double interp_abs(const IntegralSamples& s, double t) {
  auto it = std::lower_bound(s.tau.begin(), s.tau.end(), t);
  const auto i = static_cast<std::size_t>(it - s.tau.begin());
  if (i == 0) return std::abs(s.values.front());
  if (i >= s.size()) return std::abs(s.values.back());
  const double w = (t - s.tau[i - 1]) / (s.tau[i] - s.tau[i - 1]);
  return (1.0 - w) * std::abs(s.values[i - 1]) + w * std::abs(s.values[i]);
}

}  // namespace detail

// Radial distance between consecutive windings of the integral curve at tau,
// one winding being a tau step of 2 pi / |f(0)|.
inline double winding_gap(const IntegralSamples& s, double f0, double tau) {
  const double period = 2.0 * std::numbers::pi / std::abs(f0);
  return detail::interp_abs(s, tau) - detail::interp_abs(s, tau + period);
}

// Integral curves: upper bound from the outermost winding gap and the curve
// size, lower bound twice the innermost winding gap. A curve whose windings
// do not shrink (no accumulation) gets two decades below eps_max.
inline ScaleWindow integral_curve_window(const IntegralSamples& s, double f0, const Polyline& curve) {
  if (s.size() < 2) throw InputError("window needs at least two samples");
  const double diam = bounding_box(curve).diameter();
  if (!(diam > 0.0)) throw InputError("curve is a single point");
  if (f0 == 0.0) return detail::finish_window(diam / 20.0, 0.0, "diam/20, two decades");
  const double period = 2.0 * std::numbers::pi / std::abs(f0);
  const double t_lo = s.tau.front(), t_hi = s.tau.back();
  double gap_start = winding_gap(s, f0, t_lo);
  double gap_end = t_hi - period > t_lo ? winding_gap(s, f0, t_hi - period) : 0.0;
  double eps_max = diam / 20.0;
  if (gap_start > 0.0) eps_max = std::min(eps_max, gap_start / 2.0);
  return detail::finish_window(eps_max, gap_end > 0.0 ? 2.0 * gap_end : 0.0,
                               "min(diam/20, outer gap/2) to 2 * inner gap");
}

// Spirals r = f(phi) on [phi_start, phi_max], using the same rule with the
// exact radius. With a log factor the winding gap first grows and then
// decays, so the upper bound uses the largest gap.
template <class Radius>
ScaleWindow spiral_window(Radius&& r, double phi_start, double phi_max, const Polyline& curve) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double diam = bounding_box(curve).diameter();
  double gap_max = 0.0;
  for (double phi = phi_start; phi + two_pi <= phi_max; phi += two_pi / 64.0)
    gap_max = std::max(gap_max, r(phi) - r(phi + two_pi));
  const double gap_end = r(phi_max - two_pi) - r(phi_max);
  double eps_max = diam / 20.0;
  if (gap_max > 0.0) eps_max = std::min(eps_max, gap_max / 2.0);
  return detail::finish_window(eps_max, gap_end > 0.0 ? 2.0 * gap_end : 0.0,
                               "min(diam/20, largest gap/2) to 2 * inner gap");
}

// Chirp graphs x^alpha [log 1/x]^l sin(x^-beta) on [t_min, 1]: the local
// period 2 pi t^(beta+1) / beta at t_min sets the finest resolved scale.
inline ScaleWindow chirp_window(double beta, double t_min, const Polyline& graph) {
  const double diam = bounding_box(graph).diameter();
  const double period = 2.0 * std::numbers::pi * std::pow(t_min, beta + 1.0) / beta;
  return detail::finish_window(diam / 40.0, 10.0 * period, "diam/40 to 10 * period at t_min");
}

// Graphs of reflected components (t, x(t)).
inline ScaleWindow graph_window(const Polyline& graph) {
  const auto bb = bounding_box(graph);
  const double size = std::min(bb.width(), bb.height());
  if (!(size > 0.0)) throw InputError("graph is flat");
  return detail::finish_window(size / 20.0, 0.0, "min(width, height)/20, two decades");
}

inline EpsilonGrid window_grid(const ScaleWindow& w, int count = kDefaultGridCount) {
  return make_epsilon_grid(w.eps_max, w.eps_min, count);
}

}  // namespace oscfrac
