#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "oscfrac/error.hpp"

namespace oscfrac {

namespace detail {

// Lanczos approximation, g = 7, nine coefficients.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// log Gamma for x >= 0.5
inline double lanczos_lgamma(double x) {
  x -= 1.0;
  double a = kLanczosCoef[0];
  const double t = x + kLanczosG + 0.5;
  for (int i = 1; i < 9; ++i) a += kLanczosCoef[i] / (x + i);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace detail

inline double gamma_function(double x) {
  if (std::isnan(x)) return x;
  if (detail::is_nonpositive_integer(x)) throw InputError("gamma: pole at non-positive integer");
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_function(1.0 - x));
  }
  if (x == std::floor(x) && x <= 25.0) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
    return f;
  }
  return std::exp(detail::lanczos_lgamma(x));
}

// log|Gamma(x)|
inline double log_gamma(double x) {
  if (detail::is_nonpositive_integer(x)) throw InputError("log_gamma: pole at non-positive integer");
  if (x < 0.5)
    return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
  return detail::lanczos_lgamma(x);
}

inline double beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("beta: arguments must be positive");
  // symmetric in (a, b) by construction
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

}  // namespace oscfrac
