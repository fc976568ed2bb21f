#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "oscfrac/error.hpp"

namespace oscfrac {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre nodes by Newton iteration on P_n.
inline GaussRule make_gauss_legendre(int n) {
  if (n < 1) throw InputError("Gauss-Legendre order must be >= 1");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

inline const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

// Composite Gauss-Legendre with `panels` equal panels on [a, b].
template <class F>
double composite_gauss(F&& f, double a, double b, int panels, int order = 8) {
  const GaussRule& g = gauss_legendre(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) sum += g.weights[i] * f(mid + 0.5 * h * g.nodes[i]);
  }
  return 0.5 * h * sum;
}

struct TanhSinhResult {
  double value = 0.0;
  double error = 0.0;
  int levels = 0;
};

// Double-exponential quadrature on [a, b]. The integrand receives
// (x, x - a, b - x) so endpoint singularities can be evaluated without
// cancellation. Levels are refined until successive estimates agree.
template <class F>
TanhSinhResult tanh_sinh(F&& f, double a, double b, double abs_tol = 1e-12, int max_level = 12) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double tmax = 6.0;
  auto term = [&](double t) {
    const double s = 0.5 * std::numbers::pi * std::sinh(t);
    const double c = std::cosh(s);
    const double u = 1.0 / (std::exp(s) * c);  // 1 - tanh(s)
    const double w = 0.5 * std::numbers::pi * std::cosh(t) / (c * c);
    const double x = mid + half * std::tanh(s);
    double dist_a, dist_b;
    if (s >= 0) {
      dist_b = half * u;
      dist_a = (b - a) - dist_b;
    } else {
      const double up = 1.0 / (std::exp(-s) * c);  // 1 + tanh(s)
      dist_a = half * up;
      dist_b = (b - a) - dist_a;
    }
    if (dist_a <= 0.0 || dist_b <= 0.0) return 0.0;
    const double v = f(x, dist_a, dist_b);
    return std::isfinite(v) ? w * v : 0.0;
  };
  double h = 1.0;
  double sum = term(0.0);
  for (double t = h; t <= tmax; t += h) sum += term(t) + term(-t);
  double prev = sum * h * half;
  TanhSinhResult res{prev, std::numeric_limits<double>::infinity(), 0};
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    for (double t = h; t <= tmax; t += 2.0 * h) sum += term(t) + term(-t);
    const double cur = sum * h * half;
    res.value = cur;
    res.error = std::abs(cur - prev);
    res.levels = level;
    if (level >= 3 && res.error <= abs_tol) return res;
    prev = cur;
  }
  return res;
}

}  // namespace oscfrac
