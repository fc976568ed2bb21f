#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oscfrac/error.hpp"
#include "oscfrac/geometry.hpp"
#include "oscfrac/parallel.hpp"
#include "oscfrac/phase.hpp"
#include "oscfrac/quadrature.hpp"
#include "oscfrac/rational.hpp"
#include "oscfrac/special.hpp"

namespace oscfrac {

using cplx = std::complex<double>;

struct QuadratureConfig {
  int points_per_wavelength = 16;
  int panel_order = 8;
  long max_panels = 400000;      // per axis
  long max_nodes = 40000000;     // total tensor nodes
  int min_panels = 48;           // per axis, resolves the amplitude at small tau
  int dimension = 1;

  void validate() const {
    if (points_per_wavelength < 8) throw InputError("points_per_wavelength must be >= 8");
    if (panel_order < 2 || panel_order > 64) throw InputError("panel_order must be in [2, 64]");
    if (max_panels < 1 || max_nodes < 1 || min_panels < 1) throw InputError("quadrature budgets must be positive");
  }
};

struct IntegralSamples {
  std::vector<double> tau;
  std::vector<cplx> values;
  std::string phase_id;
  std::string amplitude_id;

  std::size_t size() const { return tau.size(); }
};

struct CurvePolyline {
  std::vector<Vec2> points;
  std::vector<double> tau;

  Polyline polyline() const { return Polyline{points, true}; }
};

enum class Component { re, im };

struct ReflectedGraph {
  std::vector<Vec2> points;  // (t, x(t)) with t = 1/tau, increasing t
  Component component = Component::re;

  Polyline polyline() const { return Polyline{points, true}; }
};

namespace detail {

inline double unit_ball_surface(int n) {
  // surface area of the unit sphere in R^n
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma_function(0.5 * n);
}

// Univariate polynomial coefficients, index = power.
using Poly1 = std::vector<double>;

inline double eval_poly1(const Poly1& p, double x) {
  double s = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) s = s * x + p[k];
  return s;
}

inline Poly1 derivative1(const Poly1& p) {
  Poly1 d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = k * p[k];
  return d;
}

inline bool all_even(const Poly1& p) {
  for (std::size_t k = 1; k < p.size(); k += 2)
    if (p[k] != 0.0) return false;
  return true;
}

// Max of |p| on [a, b] from a dense sample with a small safety margin.
inline double max_abs_on(const Poly1& p, double a, double b) {
  double m = 0.0;
  const int N = 4000;
  for (int i = 0; i <= N; ++i) m = std::max(m, std::abs(eval_poly1(p, a + (b - a) * i / N)));
  return 1.02 * m;
}

// g = f - f(0) written as a sum of univariate pieces, one per axis.
inline bool split_separable(const PolynomialPhase& phase, std::vector<Poly1>& parts) {
  const int n = phase.dimension();
  parts.assign(n, Poly1(1, 0.0));
  for (const auto& [k, c] : phase.terms()) {
    int axis = -1, nz = 0;
    for (int i = 0; i < n; ++i)
      if (k[i] != 0) {
        axis = i;
        ++nz;
      }
    if (nz == 0) continue;
    if (nz > 1) return false;
    auto& p = parts[axis];
    if (static_cast<int>(p.size()) <= k[axis]) p.resize(k[axis] + 1, 0.0);
    p[k[axis]] += c;
  }
  return true;
}

// If g(x) = h(|x|^2) for a polynomial h, returns h (index = power of |x|^2).
inline bool split_radial(const PolynomialPhase& phase, Poly1& h) {
  const int n = phase.dimension();
  h.assign(1, 0.0);
  for (const auto& [k, c] : phase.terms()) {
    bool only_first = true;
    for (int i = 1; i < n; ++i) only_first = only_first && k[i] == 0;
    if (!only_first || k[0] == 0) continue;
    if (k[0] % 2) return false;
    const int m = k[0] / 2;
    if (static_cast<int>(h.size()) <= m) h.resize(m + 1, 0.0);
    h[m] = c;
  }
  // expand sum_m h_m (x_1^2 + ... + x_n^2)^m and compare term by term
  PolynomialPhase expanded(n);
  expanded.add_term(MultiIndex(n, 0), phase.constant_term());
  for (std::size_t m = 1; m < h.size(); ++m) {
    if (h[m] == 0.0) continue;
    PolynomialPhase power(n);
    power.add_term(MultiIndex(n, 0), 1.0);
    for (std::size_t r = 0; r < m; ++r) {
      PolynomialPhase next(n);
      for (const auto& [k, c] : power.terms())
        for (int i = 0; i < n; ++i) {
          MultiIndex k2 = k;
          k2[i] += 2;
          next.add_term(k2, c);
        }
      power = next;
    }
    for (const auto& [k, c] : power.terms()) expanded.add_term(k, h[m] * c);
  }
  if (expanded.terms().size() != phase.terms().size()) return false;
  for (const auto& [k, c] : phase.terms()) {
    const double e = expanded.coefficient(k);
    if (std::abs(e - c) > 1e-12 * std::max(1.0, std::abs(c))) return false;
  }
  return true;
}

struct AxisNodes {
  std::vector<double> x;
  std::vector<double> w;
};

inline AxisNodes axis_nodes(double a, double b, double L, double tau_max, const QuadratureConfig& cfg) {
  const double wavelength = 2.0 * std::numbers::pi / (std::max(tau_max, 0.0) * std::max(L, 1e-300));
  const double panel_width = cfg.panel_order * wavelength / cfg.points_per_wavelength;
  double panels_d = std::ceil((b - a) / panel_width);
  if (!std::isfinite(panels_d)) panels_d = cfg.min_panels;
  panels_d = std::max<double>(panels_d, cfg.min_panels);
  if (panels_d > static_cast<double>(cfg.max_panels))
    throw BudgetError("quadrature panel budget exceeded (tau too large for the configuration)");
  const long panels = static_cast<long>(panels_d);
  const GaussRule& g = gauss_legendre(cfg.panel_order);
  AxisNodes out;
  out.x.reserve(panels * cfg.panel_order);
  out.w.reserve(panels * cfg.panel_order);
  const double h = (b - a) / panels;
  for (long p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < cfg.panel_order; ++i) {
      out.x.push_back(mid + 0.5 * h * g.nodes[i]);
      out.w.push_back(0.5 * h * g.weights[i]);
    }
  }
  return out;
}

}  // namespace detail

// Precomputed quadrature for I(tau) = int e^{i tau f(x)} phi(x) dx, valid for
// |tau| <= tau_max. Three strategies: radial phases reduce to one radial
// integral, separable phases use per-axis nodes (folded when the axis part
// is even, since the amplitude is even in every axis), everything else uses
// a tensor grid restricted to the support ball.
class IntegralEvaluator {
 public:
  enum class Strategy { radial, separable, generic };

  IntegralEvaluator(const PolynomialPhase& phase, const AmplitudeSpec& amp, double tau_max,
                    QuadratureConfig cfg = {})
      : f0_(phase.constant_term()), n_(phase.dimension()) {
    cfg.validate();
    amp.validate();
    if (amp.dimension != phase.dimension()) throw InputError("amplitude and phase dimensions differ");
    if (!(tau_max > 0.0) || !std::isfinite(tau_max)) throw InputError("tau must be positive and finite");
    if (n_ > 3) throw InputError("integration supports n <= 3");
    tau_max_ = tau_max;
    const double R = amp.radius;
    std::vector<detail::Poly1> parts;
    detail::Poly1 h;
    if (n_ >= 2 && detail::split_radial(phase, h)) {
      strategy_ = Strategy::radial;
      // g(r) = h(r^2); g'(r) = 2 r h'(r^2)
      auto gr = [&](double r) { return detail::eval_poly1(h, r * r) - h[0]; };
      const auto dh = detail::derivative1(h);
      double L = 0.0;
      for (int i = 0; i <= 4000; ++i) {
        const double r = R * i / 4000.0;
        L = std::max(L, std::abs(2.0 * r * detail::eval_poly1(dh, r * r)));
      }
      auto nodes = detail::axis_nodes(0.0, R, 1.02 * L, tau_max, cfg);
      const double surf = detail::unit_ball_surface(n_);
      for (std::size_t i = 0; i < nodes.x.size(); ++i) {
        const double r = nodes.x[i];
        g_.push_back(gr(r));
        w_.push_back(nodes.w[i] * surf * std::pow(r, n_ - 1) * amp.value_at_origin *
                     bump_profile(r * r / (R * R)));
      }
      return;
    }
    if (detail::split_separable(phase, parts) && n_ <= 2) {
      strategy_ = Strategy::separable;
      for (int ax = 0; ax < n_; ++ax) {
        auto& p = parts[ax];
        p[0] = 0.0;
        const bool fold = detail::all_even(p);
        const double L = detail::max_abs_on(detail::derivative1(p), -R, R);
        auto nodes = detail::axis_nodes(fold ? 0.0 : -R, R, L, tau_max, cfg);
        if (fold)
          for (auto& w : nodes.w) w *= 2.0;
        axis_g_.emplace_back();
        for (double x : nodes.x) axis_g_.back().push_back(detail::eval_poly1(p, x));
        axis_x_.push_back(std::move(nodes.x));
        axis_w_.push_back(std::move(nodes.w));
      }
      if (n_ == 1) {
        for (std::size_t i = 0; i < axis_x_[0].size(); ++i) {
          g_.push_back(axis_g_[0][i]);
          w_.push_back(axis_w_[0][i] * eval_amplitude(amp, {axis_x_[0][i]}));
        }
        return;
      }
      const auto nx = static_cast<Eigen::Index>(axis_x_[0].size());
      const auto ny = static_cast<Eigen::Index>(axis_x_[1].size());
      if (static_cast<double>(nx) * ny > static_cast<double>(cfg.max_nodes))
        throw BudgetError("quadrature node budget exceeded (tau too large for the configuration)");
      W_.resize(nx, ny);
      for (Eigen::Index i = 0; i < nx; ++i)
        for (Eigen::Index j = 0; j < ny; ++j)
          W_(i, j) = axis_w_[0][i] * axis_w_[1][j] * eval_amplitude(amp, {axis_x_[0][i], axis_x_[1][j]});
      return;
    }
    strategy_ = Strategy::generic;
    PolynomialPhase g = phase;
    g.add_term(MultiIndex(n_, 0), -phase.constant_term());
    const auto grad = gradient_polys(g);
    // max |grad g| over the support ball, sampled
    double L = 0.0;
    const int S = n_ == 3 ? 40 : 200;
    std::vector<int> idx(n_, 0);
    std::vector<double> pt(n_);
    for (;;) {
      double r2 = 0.0;
      for (int i = 0; i < n_; ++i) {
        pt[i] = -R + 2.0 * R * idx[i] / S;
        r2 += pt[i] * pt[i];
      }
      if (r2 <= R * R) {
        double s = 0.0;
        for (const auto& gi : grad) {
          const double v = eval_phase(gi, pt);
          s += v * v;
        }
        L = std::max(L, std::sqrt(s));
      }
      int i = 0;
      while (i < n_ && ++idx[i] > S) idx[i++] = 0;
      if (i == n_) break;
    }
    L *= 1.05;
    const auto nodes = detail::axis_nodes(-R, R, L, tau_max, cfg);
    const double total = std::pow(static_cast<double>(nodes.x.size()), n_);
    if (total > static_cast<double>(cfg.max_nodes))
      throw BudgetError("quadrature node budget exceeded (tau too large for the configuration)");
    std::fill(idx.begin(), idx.end(), 0);
    const int m = static_cast<int>(nodes.x.size());
    for (;;) {
      double w = 1.0;
      for (int i = 0; i < n_; ++i) {
        pt[i] = nodes.x[idx[i]];
        w *= nodes.w[idx[i]];
      }
      const double a = eval_amplitude(amp, pt);
      if (a > 0.0) {
        g_.push_back(eval_phase(g, pt));
        w_.push_back(w * a);
      }
      int i = 0;
      while (i < n_ && ++idx[i] >= m) idx[i++] = 0;
      if (i == n_) break;
    }
  }

  Strategy strategy() const { return strategy_; }
  double tau_max() const { return tau_max_; }
  std::size_t node_count() const {
    if (strategy_ == Strategy::separable && n_ == 2) return static_cast<std::size_t>(W_.size());
    return w_.size();
  }

  // I(tau) for |tau| <= tau_max.
  cplx operator()(double tau) const {
    if (std::abs(tau) > tau_max_ * (1.0 + 1e-12)) throw InputError("tau outside the evaluator range");
    cplx sum = 0.0;
    if (strategy_ == Strategy::separable && n_ == 2) {
      const auto nx = W_.rows(), ny = W_.cols();
      Eigen::MatrixXd ey(ny, 2);
      for (Eigen::Index j = 0; j < ny; ++j) {
        const double ph = tau * axis_g_[1][j];
        ey(j, 0) = std::cos(ph);
        ey(j, 1) = std::sin(ph);
      }
      const Eigen::MatrixXd inner = W_ * ey;
      double re = 0.0, im = 0.0;
      for (Eigen::Index i = 0; i < nx; ++i) {
        const double ph = tau * axis_g_[0][i];
        const double c = std::cos(ph), s = std::sin(ph);
        re += c * inner(i, 0) - s * inner(i, 1);
        im += c * inner(i, 1) + s * inner(i, 0);
      }
      sum = {re, im};
    } else {
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < w_.size(); ++i) {
        const double ph = tau * g_[i];
        re += w_[i] * std::cos(ph);
        im += w_[i] * std::sin(ph);
      }
      sum = {re, im};
    }
    return std::polar(1.0, tau * f0_) * sum;
  }

 private:
  double f0_ = 0.0;
  int n_ = 1;
  double tau_max_ = 0.0;
  Strategy strategy_ = Strategy::generic;
  std::vector<double> g_, w_;
  std::vector<std::vector<double>> axis_x_, axis_w_, axis_g_;
  Eigen::MatrixXd W_;
};

inline cplx eval_integral(const PolynomialPhase& phase, const AmplitudeSpec& amp, double tau,
                          const QuadratureConfig& cfg = {}) {
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  return IntegralEvaluator(phase, amp, tau, cfg)(tau);
}

struct IntegralEstimate {
  cplx value;
  double abs_error = 0.0;  // difference to the run with twice the node density
};

inline IntegralEstimate eval_integral_with_error(const PolynomialPhase& phase, const AmplitudeSpec& amp,
                                                 double tau, const QuadratureConfig& cfg = {}) {
  const cplx v = eval_integral(phase, amp, tau, cfg);
  QuadratureConfig fine = cfg;
  fine.points_per_wavelength *= 2;
  fine.min_panels *= 2;
  const cplx w = eval_integral(phase, amp, tau, fine);
  return {w, std::abs(w - v)};
}

// int phi dx, the tau -> 0 limit of I(tau) and an upper bound for |I|.
inline double amplitude_integral(const AmplitudeSpec& amp) {
  amp.validate();
  const double R = amp.radius;
  const int n = amp.dimension;
  const double radial = composite_gauss(
      [&](double r) { return std::pow(r, n - 1) * bump_profile(r * r / (R * R)); }, 0.0, R, 256, 8);
  const double surf = n == 1 ? 2.0 : detail::unit_ball_surface(n);
  return amp.value_at_origin * surf * radial;
}

inline std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo)) throw InputError("grid needs 0 < lo < hi");
  if (count < 2) throw InputError("grid needs at least two points");
  std::vector<double> g(count);
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) g[i] = lo * std::exp(ratio * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline IntegralSamples sample_at(const IntegralEvaluator& ev, std::vector<double> taus) {
  IntegralSamples s;
  s.tau = std::move(taus);
  s.values.resize(s.tau.size());
  parallel_for(s.tau.size(), [&](std::size_t i) { s.values[i] = ev(s.tau[i]); });
  return s;
}

inline IntegralSamples sample_integral(const PolynomialPhase& phase, const AmplitudeSpec& amp, double tau_min,
                                       double tau_max, int count, const QuadratureConfig& cfg = {}) {
  if (!(tau_min > 0.0) || !(tau_max > tau_min)) throw InputError("need 0 < tau_min < tau_max");
  if (count < 2) throw InputError("count must be >= 2");
  const IntegralEvaluator ev(phase, amp, tau_max, cfg);
  return sample_at(ev, geometric_grid(tau_min, tau_max, count));
}

// Inserts evenly spaced tau values wherever the winding e^{i tau f(0)}
// advances by more than max_phase_step between neighbours.
inline IntegralSamples resolve_winding(const PolynomialPhase& phase, const AmplitudeSpec& amp,
                                       const IntegralSamples& samples, const QuadratureConfig& cfg = {},
                                       double max_phase_step = std::numbers::pi / 8.0,
                                       std::size_t max_points = 4000000) {
  const double f0 = std::abs(phase.constant_term());
  if (samples.size() < 2 || f0 == 0.0) return samples;
  const double step = max_phase_step / f0;
  std::vector<double> taus;
  std::vector<char> known;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    taus.push_back(samples.tau[i]);
    known.push_back(1);
    const double gap = samples.tau[i + 1] - samples.tau[i];
    const auto extra = static_cast<long>(std::ceil(gap / step)) - 1;
    for (long j = 1; j <= extra; ++j) {
      taus.push_back(samples.tau[i] + gap * j / (extra + 1));
      known.push_back(0);
    }
    if (taus.size() > max_points) throw BudgetError("curve refinement budget exceeded");
  }
  taus.push_back(samples.tau.back());
  known.push_back(1);
  std::vector<double> fresh;
  for (std::size_t i = 0; i < taus.size(); ++i)
    if (!known[i]) fresh.push_back(taus[i]);
  IntegralSamples out;
  out.phase_id = samples.phase_id;
  out.amplitude_id = samples.amplitude_id;
  out.tau = taus;
  out.values.resize(taus.size());
  if (!fresh.empty()) {
    const IntegralEvaluator ev(phase, amp, samples.tau.back(), cfg);
    const auto more = sample_at(ev, fresh);
    std::size_t k = 0, s = 0;
    for (std::size_t i = 0; i < taus.size(); ++i) out.values[i] = known[i] ? samples.values[s++] : more.values[k++];
  } else {
    out.values = samples.values;
  }
  return out;
}

inline CurvePolyline curve_from_samples(const IntegralSamples& samples) {
  if (samples.size() == 0) throw InputError("empty samples");
  CurvePolyline c;
  c.tau = samples.tau;
  c.points.reserve(samples.size());
  for (const auto& v : samples.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("non-finite sample value");
    c.points.push_back({v.real(), v.imag()});
  }
  return c;
}

inline ReflectedGraph reflected_graph(const IntegralSamples& samples, Component component) {
  if (samples.size() == 0) throw InputError("empty samples");
  ReflectedGraph g;
  g.component = component;
  for (std::size_t i = samples.size(); i-- > 0;) {
    const auto& v = samples.values[i];
    g.points.push_back({1.0 / samples.tau[i], component == Component::re ? v.real() : v.imag()});
  }
  return g;
}

struct LeadingTermFit {
  cplx a;
  double residual = 0.0;  // max relative deviation from the mean
  std::size_t used = 0;
  bool confirmed = false;
};

// Mean of I(tau) e^{-i tau f0} tau^{-beta} (log tau)^{-k} over the top decade.
inline LeadingTermFit leading_term_fit(const IntegralSamples& samples, double f0, const Rational& beta, int k,
                                       double threshold = 0.05) {
  if (samples.size() < 2) throw InputError("leading_term_fit needs samples");
  const double tmax = samples.tau.back();
  if (samples.tau.front() > tmax / 10.0 * (1.0 + 1e-12))
    throw InputError("leading_term_fit needs samples covering a decade of tau");
  if (k < 0) throw InputError("log power must be >= 0");
  const double b = beta.to_double();
  std::vector<cplx> a;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = samples.tau[i];
    if (t < tmax / 10.0 * (1.0 - 1e-12)) continue;
    a.push_back(samples.values[i] * std::polar(1.0, -t * f0) * std::pow(t, -b) * std::pow(std::log(t), -k));
  }
  LeadingTermFit fit;
  fit.used = a.size();
  cplx mean = 0.0;
  for (const auto& v : a) mean += v;
  mean /= static_cast<double>(a.size());
  fit.a = mean;
  for (const auto& v : a) fit.residual = std::max(fit.residual, std::abs(v - mean) / std::abs(mean));
  if (!std::isfinite(fit.residual)) fit.residual = std::numeric_limits<double>::infinity();
  fit.confirmed = fit.residual <= threshold;
  return fit;
}

}  // namespace oscfrac
