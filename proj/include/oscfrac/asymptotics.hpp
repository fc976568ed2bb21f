#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "oscfrac/error.hpp"
#include "oscfrac/newton.hpp"
#include "oscfrac/phase.hpp"
#include "oscfrac/quadrature.hpp"
#include "oscfrac/rational.hpp"
#include "oscfrac/special.hpp"

namespace oscfrac {

using cplx = std::complex<double>;

enum class ContentKind { value, degenerate, unknown };

inline const char* to_string(ContentKind k) {
  switch (k) {
    case ContentKind::value: return "value";
    case ContentKind::degenerate: return "degenerate";
    case ContentKind::unknown: return "unknown";
  }
  return "unknown";
}

struct AsymptoticPrediction {
  Rational beta{-1, 2};
  int multiplicity_K = 0;
  Rational curve_dim{1};
  Rational osc_dim{1};
  std::optional<cplx> leading_coeff;
  ContentKind content_kind = ContentKind::unknown;
  double content = 0.0;  // meaningful when content_kind == value
  double f0 = 0.0;
  bool degenerate = false;
  bool rectifiable = false;
  std::string note;
};

// d = 2/(1-beta), d' = (beta+3)/2, clamped to 1 once beta <= -1.
inline Rational curve_dimension(const Rational& beta) {
  if (beta <= Rational(-1)) return Rational(1);
  return Rational(2) / (Rational(1) - beta);
}

inline Rational oscillatory_dimension(const Rational& beta) {
  if (beta <= Rational(-1)) return Rational(1);
  return (beta + Rational(3)) / Rational(2);
}

inline AsymptoticPrediction rectifiable_prediction(const Rational& beta, double f0, std::string note) {
  AsymptoticPrediction p;
  p.beta = beta;
  p.curve_dim = Rational(1);
  p.osc_dim = Rational(1);
  p.f0 = f0;
  p.rectifiable = true;
  p.content_kind = ContentKind::unknown;
  p.note = std::move(note);
  return p;
}

// Leading coefficient of a nondegenerate quadratic critical point in 1D.
inline cplx quadratic_leading_coefficient(double phi0, double f_second) {
  if (f_second == 0.0) throw InputError("second derivative must be nonzero");
  const double mag = phi0 * std::sqrt(2.0 * std::numbers::pi / std::abs(f_second));
  const double arg = (f_second > 0 ? 1.0 : -1.0) * std::numbers::pi / 4.0;
  return std::polar(mag, arg);
}

// Content of the curve for critical order s from the leading constant C1.
inline double content_from_c1(int s, double c1_abs, double f0) {
  if (s < 2) throw InputError("critical order must be >= 2");
  const double af0 = std::abs(f0);
  if (af0 == 0.0) throw InputError("f0 must be nonzero");
  const double sd = static_cast<double>(s);
  return std::pow(c1_abs, 2.0 * sd / (sd + 1.0)) * std::numbers::pi *
         std::pow(std::numbers::pi / (sd * af0), -2.0 / (sd + 1.0)) * (sd + 1.0) / (sd - 1.0);
}

inline AsymptoticPrediction predict_1d(CriticalOrder order, double f0, double phi0,
                                       std::optional<double> f_second = std::nullopt) {
  const int s = order.s;
  if (s < 2) throw InputError("critical order must be >= 2");
  const Rational beta(-1, s);
  if (f0 == 0.0) return rectifiable_prediction(beta, f0, "f(0) = 0: curve lies on a ray, all dimensions 1");
  AsymptoticPrediction p;
  p.beta = beta;
  p.curve_dim = Rational(2 * s, s + 1);
  p.osc_dim = Rational(3 * s - 1, 2 * s);
  p.f0 = f0;
  if (s == 2 && f_second) {
    cplx c1 = quadratic_leading_coefficient(phi0, *f_second);
    p.leading_coeff = c1;
    p.content_kind = ContentKind::value;
    p.content = content_from_c1(2, std::abs(c1), f0);
  } else {
    p.content_kind = ContentKind::unknown;
    if (s >= 3) p.note = "leading constant for s >= 3 requires a numerical fit";
  }
  return p;
}

inline double content_from_coefficient(double beta, cplx a0beta, double f0) {
  if (!(beta > -1.0 && beta < 0.0)) throw InputError("beta must lie in (-1, 0)");
  if (!(f0 > 0.0)) throw InputError("f0 must be positive");
  const double a = std::abs(a0beta);
  if (a == 0.0) throw InputError("leading coefficient must be nonzero");
  const double pi = std::numbers::pi;
  return std::pow(a / std::pow(f0, beta), 2.0 / (1.0 - beta)) *
         std::pow(-beta, 2.0 * beta / (1.0 - beta)) * std::pow(pi, (1.0 + beta) / (1.0 - beta)) *
         (1.0 - beta) / (1.0 + beta);
}

inline AsymptoticPrediction predict_2d(const DiagramInfo& diagram, double f0,
                                       std::optional<cplx> a0beta = std::nullopt) {
  if (diagram.n != 2) throw InputError("predict_2d needs a two-dimensional diagram");
  const Rational beta = diagram.remoteness;
  if (f0 == 0.0) return rectifiable_prediction(beta, f0, "f(0) = 0: curve lies on a ray, all dimensions 1");
  if (diagram.multiplicity >= 1 && beta <= Rational(-1))
    throw InputError("multiplicity 1 with beta <= -1 has no prediction");
  if (beta < Rational(-1))
    return rectifiable_prediction(beta, f0, "beta < -1: integral decays faster than 1/tau");
  AsymptoticPrediction p;
  p.beta = beta;
  p.multiplicity_K = diagram.multiplicity;
  p.curve_dim = curve_dimension(beta);
  p.osc_dim = oscillatory_dimension(beta);
  p.f0 = f0;
  if (diagram.multiplicity >= 1) {
    p.degenerate = true;
    p.content_kind = ContentKind::degenerate;
    p.note = "center on a vertex: log-corrected leading term";
    return p;
  }
  if (beta == Rational(-1)) {
    p.content_kind = ContentKind::unknown;
    p.note = "beta = -1: marginally rectifiable curve";
    return p;
  }
  if (a0beta) {
    p.leading_coeff = *a0beta;
    p.content_kind = ContentKind::value;
    p.content = content_from_coefficient(beta.to_double(), *a0beta, std::abs(f0));
  }
  return p;
}

// coeff_hypothesis: index L of the leading nonzero a_{L,beta} asserted by the caller.
inline AsymptoticPrediction predict_nd(const DiagramInfo& diagram, double f0,
                                       std::optional<int> coeff_hypothesis,
                                       std::optional<cplx> a0beta = std::nullopt) {
  if (diagram.n <= 2) throw InputError("predict_nd needs n > 2");
  const Rational beta = diagram.remoteness;
  if (f0 == 0.0) return rectifiable_prediction(beta, f0, "f(0) = 0: curve lies on a ray, all dimensions 1");
  if (!diagram.is_remote)
    return rectifiable_prediction(beta, f0, "polyhedron not remote (beta <= -1): rectifiable regime");
  if (!coeff_hypothesis) throw InputError("predict_nd needs a coefficient hypothesis");
  if (*coeff_hypothesis < 0 || *coeff_hypothesis > diagram.n - 1)
    throw InputError("coefficient hypothesis index out of range");
  AsymptoticPrediction p;
  p.beta = beta;
  p.multiplicity_K = *coeff_hypothesis;
  p.curve_dim = curve_dimension(beta);
  p.osc_dim = oscillatory_dimension(beta);
  p.f0 = f0;
  if (*coeff_hypothesis > 0) {
    p.degenerate = true;
    p.content_kind = ContentKind::degenerate;
    p.note = "log power in leading term asserted";
  } else if (a0beta) {
    p.leading_coeff = *a0beta;
    p.content_kind = ContentKind::value;
    p.content = content_from_coefficient(beta.to_double(), *a0beta, std::abs(f0));
  }
  return p;
}

enum class CausticFamily { A, D };

struct CausticType {
  CausticFamily family = CausticFamily::A;
  int k = 1;
  int n = 1;
};

struct CausticPrediction {
  AsymptoticPrediction prediction;
  Rational gamma;
  Rational limit_curve_dim;  // as k -> infinity
};

inline CausticPrediction caustic_prediction(const CausticType& c) {
  if (c.n < 1) throw InputError("ambient dimension must be >= 1");
  Rational gamma;
  if (c.family == CausticFamily::A) {
    if (c.k < 1) throw InputError("A_k needs k >= 1");
    gamma = Rational(c.k - 1, 2 * c.k + 2);
  } else {
    if (c.k < 4) throw InputError("D_k needs k >= 4");
    if (c.n < 2) throw InputError("D_k needs n >= 2");
    gamma = Rational(c.k - 2, 2 * c.k - 2);
  }
  CausticPrediction out;
  out.gamma = gamma;
  out.limit_curve_dim = Rational(4, 1 + c.n);
  auto& p = out.prediction;
  p.beta = gamma - Rational(c.n, 2);
  p.curve_dim = curve_dimension(p.beta);
  p.osc_dim = oscillatory_dimension(p.beta);
  p.rectifiable = p.beta <= Rational(-1);
  p.f0 = 1.0;
  return out;
}

namespace detail {

// Integral over the real line of (sigma + y^q)_+^beta or (sigma + y^q)_-^beta,
// |sigma| = 1. Pieces are split at the real roots; near a root the value is
// evaluated from the shifted expansion to avoid cancellation.
inline double signed_part_integral(int q, double sigma, double beta, bool positive, double tol) {
  std::vector<double> roots;
  if (q % 2 == 1)
    roots.push_back(-sigma);
  else if (sigma < 0) {
    roots.push_back(-1.0);
    roots.push_back(1.0);
  }
  auto value_near = [&](double y, double anchor, double d) {
    // sigma + (anchor + d)^q with sigma + anchor^q == 0
    (void)y;
    double sum = 0.0, binom = 1.0;
    for (int j = 1; j <= q; ++j) {
      binom = binom * (q - j + 1) / j;
      sum += binom * ipow(anchor, q - j) * ipow(d, j);
    }
    return sum;
  };
  auto power_part = [&](double v) {
    if (positive) return v > 0.0 ? std::pow(v, beta) : 0.0;
    return v < 0.0 ? std::pow(-v, beta) : 0.0;
  };

  double lo = -1.0, hi = 1.0;
  if (!roots.empty()) {
    lo = std::min(lo, roots.front() - 1.0);
    hi = std::max(hi, roots.back() + 1.0);
  }
  std::vector<double> cuts{lo};
  for (double r : roots) cuts.push_back(r);
  cuts.push_back(hi);

  double total = 0.0;
  auto is_root = [&](double x) {
    for (double r : roots)
      if (x == r) return true;
    return false;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (a == b) continue;
    const bool ra = is_root(a), rb = is_root(b);
    auto f = [&](double y, double da, double db) {
      double v;
      if (ra && (da <= db || !rb))
        v = value_near(y, a, da);
      else if (rb)
        v = value_near(y, b, -db);
      else
        v = sigma + ipow(y, q);
      return power_part(v);
    };
    const auto r = tanh_sinh(f, a, b, tol);
    if (!(r.error <= 100 * tol)) throw ConvergenceError("coefficient integral did not converge");
    total += r.value;
  }
  // tails: y = edge / u on (0, 1]
  for (double edge : {lo, hi}) {
    auto f = [&](double u, double du, double) {
      (void)u;
      const double uu = du;  // distance from 0 is u itself
      const double y = edge / uu;
      const double v = sigma + ipow(y, q);
      return power_part(v) * std::abs(edge) / (uu * uu);
    };
    const auto r = tanh_sinh(f, 0.0, 1.0, tol);
    if (!(r.error <= 100 * tol)) throw ConvergenceError("coefficient tail integral did not converge");
    total += r.value;
  }
  return total;
}

}  // namespace detail

struct GreenblattParts {
  double c0 = 0.0;
  double C0 = 0.0;
  cplx a0beta;
};

inline GreenblattParts greenblatt_parts(int p, int q, double phi00, double tol = 1e-11) {
  if (p < 2 || q < 2) throw InputError("p and q must be >= 2");
  if (p == 2 && q == 2) throw InputError("(p, q) = (2, 2) has beta = -1; use the quadratic formula");
  const double beta = -1.0 / p - 1.0 / q;
  const double m = static_cast<double>(p) / q;
  const double pref = phi00 / (m + 1.0);
  const double sig_minus = (p % 2 == 0) ? 1.0 : -1.0;  // S0(-1, y) = (-1)^p + y^q
  GreenblattParts g;
  g.c0 = pref * (detail::signed_part_integral(q, 1.0, beta, true, tol) +
                 detail::signed_part_integral(q, sig_minus, beta, true, tol));
  g.C0 = pref * (detail::signed_part_integral(q, 1.0, beta, false, tol) +
                 detail::signed_part_integral(q, sig_minus, beta, false, tol));
  const double pi = std::numbers::pi;
  g.a0beta = -beta * gamma_function(-beta) *
             (std::polar(1.0, -pi * beta / 2.0) * g.c0 + std::polar(1.0, pi * beta / 2.0) * g.C0);
  return g;
}

// Leading coefficient for x^p + y^q by numerical integration. `beta` must
// equal -1/p - 1/q.
inline cplx greenblatt_coefficient(int p, int q, double phi00, const Rational& beta) {
  if (beta != Rational(-1, p) - Rational(1, q)) throw InputError("beta does not match -1/p - 1/q");
  return greenblatt_parts(p, q, phi00).a0beta;
}

// Closed form valid when p and q are both even.
inline cplx greenblatt_closed_form(int p, int q, double phi00) {
  if (p % 2 || q % 2) throw InputError("closed form needs even p and q");
  const double pi = std::numbers::pi;
  return 4.0 * phi00 * std::polar(1.0, pi / 2.0 * (1.0 / p + 1.0 / q)) * gamma_function(1.0 / p + 1.0) *
         gamma_function(1.0 / q + 1.0);
}

// Minkowski content of the spiral r = m * phi^(-alpha).
inline double spiral_content(double alpha, double m) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  const double pi = std::numbers::pi;
  const double d = 2.0 / (1.0 + alpha);
  return std::pow(m, d) * pi * std::pow(pi * alpha, -2.0 * alpha / (1.0 + alpha)) * (1.0 + alpha) /
         (1.0 - alpha);
}

// Dispatches on dimension. coeff_hypothesis is only consulted for n > 2.
inline AsymptoticPrediction predict_phase(const PolynomialPhase& phase, const AmplitudeSpec& amp,
                                          std::optional<int> coeff_hypothesis = std::nullopt,
                                          std::optional<cplx> a0beta = std::nullopt) {
  const int n = phase.dimension();
  const double f0 = phase.constant_term();
  for (int i = 0; i < n; ++i) {
    MultiIndex e(n, 0);
    e[i] = 1;
    if (phase.coefficient(e) != 0.0)
      return rectifiable_prediction(Rational(-1), f0, "no critical point at the origin: rectifiable");
  }
  if (n == 1) {
    const auto s = critical_order_1d(phase);
    std::optional<double> f2;
    if (s.s == 2) f2 = 2.0 * phase.coefficient({2});
    return predict_1d(s, f0, amp.value_at_origin, f2);
  }
  const auto diagram = newton_diagram(phase);
  if (n == 2) {
    // pure x^p + y^q principal parts have a computable coefficient
    if (!a0beta && diagram.multiplicity == 0 && diagram.faces.size() == 3) {
      const auto& edge = diagram.faces.back();
      if (edge.dim == 1 && edge.vertices.size() == 2 && edge.points.size() == 2) {
        const auto& v0 = edge.vertices[0];
        const auto& v1 = edge.vertices[1];
        if (v0[0] == 0 && v1[1] == 0 && phase.coefficient(v0) == 1.0 && phase.coefficient(v1) == 1.0 &&
            !(v1[0] == 2 && v0[1] == 2) && diagram.is_remote)
          a0beta = greenblatt_parts(v1[0], v0[1], amp.value_at_origin).a0beta;
      }
    }
    return predict_2d(diagram, f0, a0beta);
  }
  return predict_nd(diagram, f0, coeff_hypothesis, a0beta);
}

}  // namespace oscfrac
