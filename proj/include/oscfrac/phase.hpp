#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oscfrac/error.hpp"

namespace oscfrac {

using MultiIndex = std::vector<int>;

// Polynomial in n variables stored as exponent vector -> coefficient.
// Zero coefficients are never stored.
class PolynomialPhase {
 public:
  PolynomialPhase() = default;
  explicit PolynomialPhase(int n) : n_(n) {
    if (n < 1) throw InputError("phase dimension must be >= 1");
  }

  int dimension() const { return n_; }
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Adds c * x^k, merging with an existing term.
  PolynomialPhase& add_term(const MultiIndex& k, double c) {
    if (static_cast<int>(k.size()) != n_)
      throw InputError("multi-index length does not match phase dimension");
    for (int e : k)
      if (e < 0) throw InputError("negative exponent in multi-index");
    if (!std::isfinite(c)) throw InputError("non-finite coefficient");
    const double v = (terms_.count(k) ? terms_.at(k) : 0.0) + c;
    if (v == 0.0)
      terms_.erase(k);
    else
      terms_[k] = v;
    return *this;
  }

  double coefficient(const MultiIndex& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? 0.0 : it->second;
  }

  double constant_term() const { return coefficient(MultiIndex(n_, 0)); }

  int degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) {
      int s = 0;
      for (int e : k) s += e;
      d = std::max(d, s);
    }
    return d;
  }

  int max_exponent(int axis) const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k[axis]);
    return d;
  }

  friend bool operator==(const PolynomialPhase& a, const PolynomialPhase& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  int n_ = 1;
  std::map<MultiIndex, double> terms_;
};

struct AmplitudeSpec {
  int dimension = 1;
  double radius = 1.0;
  double value_at_origin = 1.0;

  void validate() const {
    if (dimension < 1) throw InputError("amplitude dimension must be >= 1");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("amplitude radius must be > 0");
    if (!(value_at_origin > 0.0) || !std::isfinite(value_at_origin))
      throw InputError("amplitude value at origin must be > 0");
  }
};

struct CriticalOrder {
  int s = 2;
};

inline double ipow(double x, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

inline double eval_phase(const PolynomialPhase& phase, const std::vector<double>& point) {
  if (static_cast<int>(point.size()) != phase.dimension())
    throw InputError("point dimension does not match phase dimension");
  double sum = 0.0;
  for (const auto& [k, c] : phase.terms()) {
    double m = c;
    for (std::size_t i = 0; i < k.size(); ++i) m *= ipow(point[i], k[i]);
    sum += m;
  }
  return sum;
}

inline PolynomialPhase partial_derivative(const PolynomialPhase& phase, int axis) {
  if (axis < 0 || axis >= phase.dimension()) throw InputError("derivative axis out of range");
  PolynomialPhase out(phase.dimension());
  for (const auto& [k, c] : phase.terms()) {
    if (k[axis] == 0) continue;
    MultiIndex k2 = k;
    k2[axis] -= 1;
    out.add_term(k2, c * k[axis]);
  }
  return out;
}

inline std::vector<PolynomialPhase> gradient_polys(const PolynomialPhase& phase) {
  std::vector<PolynomialPhase> g;
  for (int i = 0; i < phase.dimension(); ++i) g.push_back(partial_derivative(phase, i));
  return g;
}

inline CriticalOrder critical_order_1d(const PolynomialPhase& phase) {
  if (phase.dimension() != 1) throw InputError("critical_order_1d needs a one-dimensional phase");
  int s = std::numeric_limits<int>::max();
  for (const auto& [k, c] : phase.terms()) {
    if (k[0] == 1) throw InputError("phase has a linear term: 0 is not a critical point");
    if (k[0] >= 2) s = std::min(s, k[0]);
  }
  if (s == std::numeric_limits<int>::max())
    throw InputError("phase is constant: no finite critical order");
  return {s};
}

// Standard mollifier bump scaled to the requested value at the origin.
inline double eval_amplitude(const AmplitudeSpec& amp, const std::vector<double>& point) {
  if (static_cast<int>(point.size()) != amp.dimension)
    throw InputError("point dimension does not match amplitude dimension");
  double r2 = 0.0;
  for (double x : point) r2 += x * x;
  r2 /= amp.radius * amp.radius;
  if (r2 >= 1.0) return 0.0;
  return amp.value_at_origin * std::exp(1.0 - 1.0 / (1.0 - r2));
}

// Radial profile of the bump, u = |x|^2 / R^2.
inline double bump_profile(double u) {
  if (u >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u));
}

struct CriticalPointReport {
  bool pass = true;
  std::vector<double> witness;  // offending point when !pass
  double gradient_norm = 0.0;
  std::size_t samples = 0;
};

namespace detail {

inline Eigen::VectorXd eval_grad(const std::vector<PolynomialPhase>& g, const Eigen::VectorXd& x) {
  std::vector<double> p(x.data(), x.data() + x.size());
  Eigen::VectorXd r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[static_cast<Eigen::Index>(i)] = eval_phase(g[i], p);
  return r;
}

inline Eigen::MatrixXd eval_jac(const std::vector<std::vector<PolynomialPhase>>& h,
                                const Eigen::VectorXd& x) {
  std::vector<double> p(x.data(), x.data() + x.size());
  const auto m = static_cast<Eigen::Index>(h.size());
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd J(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) J(i, j) = eval_phase(h[i][j], p);
  return J;
}

// Levenberg-Marquardt on a square or overdetermined polynomial system.
inline Eigen::VectorXd levenberg_marquardt(const std::vector<PolynomialPhase>& eqs,
                                           Eigen::VectorXd x, int iters = 60) {
  std::vector<std::vector<PolynomialPhase>> jac;
  for (const auto& e : eqs) jac.push_back(gradient_polys(e));
  double lambda = 1e-3;
  Eigen::VectorXd r = eval_grad(eqs, x);
  double cost = r.squaredNorm();
  for (int it = 0; it < iters && cost > 1e-30; ++it) {
    const Eigen::MatrixXd J = eval_jac(jac, x);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int k = 0; k < 12; ++k) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda * (1.0 + JtJ.diagonal().array());
      const Eigen::VectorXd step = A.ldlt().solve(-g);
      const Eigen::VectorXd xn = x + step;
      const Eigen::VectorXd rn = eval_grad(eqs, xn);
      const double cn = rn.squaredNorm();
      if (std::isfinite(cn) && cn < cost) {
        x = xn;
        r = rn;
        cost = cn;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  return x;
}

}  // namespace detail

// Grid search for gradient zeros in delta <= |x| <= R, refined by a damped
// Newton solve from each local minimum of |grad f|.
inline CriticalPointReport verify_isolated_critical_point(const PolynomialPhase& phase,
                                                          const AmplitudeSpec& amp,
                                                          int resolution = 41) {
  const int n = phase.dimension();
  if (n > 3) throw InputError("critical point verification supports n <= 3");
  if (amp.dimension != n) throw InputError("amplitude and phase dimensions differ");
  amp.validate();
  const double R = amp.radius;
  const double delta = 1e-3 * R;
  const auto grad = gradient_polys(phase);

  int res = std::max(resolution, 5);
  if (n == 3) res = std::min(res, 31);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(res);

  auto coord = [&](std::size_t idx, std::vector<double>& p) {
    for (int i = 0; i < n; ++i) {
      const std::size_t j = idx % res;
      idx /= res;
      p[i] = -R + 2.0 * R * static_cast<double>(j) / (res - 1);
    }
  };

  std::vector<double> gnorm(total, std::numeric_limits<double>::infinity());
  std::vector<double> p(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    coord(idx, p);
    double r2 = 0.0;
    for (double x : p) r2 += x * x;
    if (r2 > R * R) continue;
    double g2 = 0.0;
    for (const auto& g : grad) {
      const double v = eval_phase(g, p);
      g2 += v * v;
    }
    gnorm[idx] = std::sqrt(g2);
  }

  // Scale used to judge "zero": typical gradient magnitude on the support.
  double scale = 0.0;
  std::size_t cnt = 0;
  for (double g : gnorm)
    if (std::isfinite(g)) {
      scale += g;
      ++cnt;
    }
  scale = cnt ? scale / cnt : 1.0;
  if (scale == 0.0) scale = 1.0;

  CriticalPointReport rep;
  rep.samples = total;
  std::vector<std::size_t> stride(n, 1);
  for (int i = 1; i < n; ++i) stride[i] = stride[i - 1] * res;

  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!std::isfinite(gnorm[idx])) continue;
    bool local_min = true;
    for (int i = 0; i < n && local_min; ++i) {
      const std::size_t j = (idx / stride[i]) % res;
      if (j > 0 && gnorm[idx - stride[i]] < gnorm[idx]) local_min = false;
      if (j + 1 < static_cast<std::size_t>(res) && gnorm[idx + stride[i]] < gnorm[idx]) local_min = false;
    }
    if (!local_min) continue;
    coord(idx, p);
    Eigen::VectorXd x0 = Eigen::Map<Eigen::VectorXd>(p.data(), n);
    const Eigen::VectorXd x = detail::levenberg_marquardt(grad, x0);
    const double rx = x.norm();
    const double gx = detail::eval_grad(grad, x).norm();
    if (rx >= delta && rx <= R && gx <= 1e-9 * scale) {
      rep.pass = false;
      rep.witness.assign(x.data(), x.data() + n);
      rep.gradient_norm = gx;
      return rep;
    }
  }
  return rep;
}

}  // namespace oscfrac
