#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oscfrac/error.hpp"
#include "oscfrac/geometry.hpp"

namespace oscfrac {

// Graph of x^alpha [log(1/x)]^l sin(x^-beta) on [t_min, 1]. The step obeys
// dt <= t^(beta+1) / (8 beta) so every oscillation gets enough vertices,
// and never exceeds (1 - t_min) / count.
inline Polyline gen_chirp(double alpha, double beta, int l, double t_min, int count = 1000,
                          std::size_t max_points = 20000000) {
  if (!(alpha > 0.0) || !(beta >= alpha)) throw InputError("chirp needs 0 < alpha <= beta");
  if (l < 0) throw InputError("log power must be >= 0");
  if (!(t_min > 0.0 && t_min < 1.0)) throw InputError("t_min must lie in (0, 1)");
  if (count < 2) throw InputError("count must be >= 2");
  auto f = [&](double t) {
    return std::pow(t, alpha) * std::pow(std::log(1.0 / t), l) * std::sin(std::pow(t, -beta));
  };
  const double cap = (1.0 - t_min) / count;
  Polyline p;
  double t = t_min;
  while (t < 1.0) {
    p.points.push_back({t, f(t)});
    if (p.points.size() > max_points) throw BudgetError("chirp oscillation cannot be resolved within the budget");
    t += std::min(cap, std::pow(t, beta + 1.0) / (8.0 * beta));
  }
  p.points.push_back({1.0, f(1.0)});
  return p;
}

inline double default_spiral_start(double alpha, int l) {
  return std::max(2.0 * std::numbers::pi, 1.05 * std::exp(l / alpha));
}

// r(phi) = m phi^-alpha [log phi]^l.
inline double spiral_radius(double alpha, double m, int l, double phi) {
  return m * std::pow(phi, -alpha) * std::pow(std::log(phi), l);
}

// Spiral r = m phi^-alpha [log phi]^l for phi in [phi_start, phi_max] with
// angular step at most pi/64. The default start keeps r radially
// decreasing when l > 0.
inline Polyline gen_spiral(double alpha, double m, int l, double phi_max, double phi_start = 0.0) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("spiral needs alpha in (0, 1]");
  if (!(m > 0.0)) throw InputError("spiral needs m > 0");
  if (l < 0) throw InputError("log power must be >= 0");
  if (phi_start == 0.0) phi_start = default_spiral_start(alpha, l);
  if (!(phi_start > std::numbers::e)) throw InputError("spiral start angle must exceed e");
  if (!(phi_max > phi_start)) throw InputError("phi_max must exceed the start angle");
  const double step = std::numbers::pi / 64.0;
  const auto n = static_cast<std::size_t>(std::ceil((phi_max - phi_start) / step));
  Polyline p;
  p.points.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double phi = phi_start + (phi_max - phi_start) * static_cast<double>(i) / n;
    const double r = spiral_radius(alpha, m, l, phi);
    p.points.push_back({r * std::cos(phi), r * std::sin(phi)});
  }
  return p;
}

// Points k^-a on the x-axis. Once consecutive points are closer than
// eps_min/4 the remaining interval [0, K^-a] is filled at that spacing,
// which is indistinguishable from the sequence at every scale >= eps_min.
inline Polyline gen_astring(double a, double eps_min) {
  if (!(a > 0.0)) throw InputError("a-string needs a > 0");
  if (!(eps_min > 0.0 && eps_min < 1.0)) throw InputError("eps_min must lie in (0, 1)");
  const double fill = eps_min / 4.0;
  Polyline p;
  p.segments = false;
  double k = 1.0;
  for (;; k += 1.0) {
    const double x = std::pow(k, -a);
    p.points.push_back({x, 0.0});
    if (x - std::pow(k + 1.0, -a) < fill) break;
  }
  const double tail = std::pow(k, -a);
  for (double x = tail - fill; x > 0.0; x -= fill) p.points.push_back({x, 0.0});
  p.points.push_back({0.0, 0.0});
  return p;
}

}  // namespace oscfrac
