#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "oscfrac/error.hpp"
#include "oscfrac/geometry.hpp"
#include "oscfrac/parallel.hpp"

namespace oscfrac {

// Strictly decreasing geometric scales.
struct EpsilonGrid {
  std::vector<double> epsilons;

  std::size_t size() const { return epsilons.size(); }
  double decades() const { return std::log10(epsilons.front() / epsilons.back()); }

  void validate(double min_decades = 1.5) const {
    if (epsilons.size() < 8) throw InputError("epsilon grid needs at least 8 values");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i])) throw InputError("epsilons must be positive");
      if (i && !(epsilons[i] < epsilons[i - 1])) throw InputError("epsilons must be strictly decreasing");
    }
    if (decades() < min_decades - 1e-9) throw InputError("epsilon grid must span at least 1.5 decades");
  }
};

inline EpsilonGrid make_epsilon_grid(double eps_max, double eps_min, int count) {
  if (!(eps_max > eps_min) || !(eps_min > 0.0)) throw InputError("need eps_max > eps_min > 0");
  if (count < 2) throw InputError("epsilon grid needs at least two values");
  EpsilonGrid g;
  const double step = std::log(eps_max / eps_min) / (count - 1);
  for (int i = 0; i < count; ++i) g.epsilons.push_back(eps_max * std::exp(-step * i));
  g.epsilons.back() = eps_min;
  return g;
}

// ---------------------------------------------------------------------------
// Box counting

struct BoxCounts {
  std::vector<double> epsilons;
  std::vector<double> counts;  // averaged over grid offsets
};

namespace detail {

inline std::uint64_t cell_key(std::int64_t ix, std::int64_t iy) {
  return (static_cast<std::uint64_t>(ix + (std::int64_t{1} << 31)) << 32) ^
         static_cast<std::uint64_t>(iy + (std::int64_t{1} << 31));
}

// Cells of side 1 crossed by the segment a -> b (grid coordinates).
inline void walk_segment(double ax, double ay, double bx, double by, std::vector<std::uint64_t>& keys) {
  std::int64_t ix = static_cast<std::int64_t>(std::floor(ax));
  std::int64_t iy = static_cast<std::int64_t>(std::floor(ay));
  const std::int64_t jx = static_cast<std::int64_t>(std::floor(bx));
  const std::int64_t jy = static_cast<std::int64_t>(std::floor(by));
  keys.push_back(cell_key(ix, iy));
  const double dx = bx - ax, dy = by - ay;
  const std::int64_t sx = dx > 0 ? 1 : -1, sy = dy > 0 ? 1 : -1;
  const double inf = std::numeric_limits<double>::infinity();
  const double tdx = dx != 0.0 ? std::abs(1.0 / dx) : inf;
  const double tdy = dy != 0.0 ? std::abs(1.0 / dy) : inf;
  double tx = dx != 0.0 ? ((sx > 0 ? (ix + 1 - ax) : (ax - ix)) * tdx) : inf;
  double ty = dy != 0.0 ? ((sy > 0 ? (iy + 1 - ay) : (ay - iy)) * tdy) : inf;
  std::int64_t steps = std::abs(jx - ix) + std::abs(jy - iy);
  while (steps-- > 0) {
    const bool step_x = ix != jx && (iy == jy || tx < ty);
    if (step_x) {
      ix += sx;
      tx += tdx;
    } else {
      iy += sy;
      ty += tdy;
    }
    keys.push_back(cell_key(ix, iy));
  }
}

inline std::size_t count_cells(const Polyline& poly, double eps, double ox, double oy) {
  std::vector<std::uint64_t> keys;
  keys.reserve(poly.size() * 2);
  const auto& p = poly.points;
  if (!poly.segments || p.size() == 1) {
    for (const auto& v : p)
      keys.push_back(cell_key(static_cast<std::int64_t>(std::floor((v.x - ox) / eps)),
                              static_cast<std::int64_t>(std::floor((v.y - oy) / eps))));
  } else {
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      walk_segment((p[i].x - ox) / eps, (p[i].y - oy) / eps, (p[i + 1].x - ox) / eps, (p[i + 1].y - oy) / eps,
                   keys);
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

}  // namespace detail

// Number of eps-cells met by the polyline, averaged over `offsets` grid
// translations drawn from a seeded generator. Offsets are fractions of eps,
// so scaling the polyline and the grid together leaves counts unchanged.
inline BoxCounts box_count(const Polyline& poly, const EpsilonGrid& grid, int offsets = 4,
                           std::uint64_t seed = 1) {
  if (poly.size() < 2) throw InputError("box_count needs at least two points");
  if (offsets < 1) throw InputError("offsets must be >= 1");
  validate_finite(poly);
  const auto bb = bounding_box(poly);
  const double diam = std::max(bb.width(), bb.height());
  for (double e : grid.epsilons)
    if (!(e > 0.0) || e > diam) throw InputError("epsilon larger than the polyline bounding box");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::pair<double, double>> shifts(offsets);
  for (auto& s : shifts) s = {U(rng), U(rng)};
  BoxCounts out;
  out.epsilons = grid.epsilons;
  out.counts.assign(grid.size(), 0.0);
  std::vector<double> per(grid.size() * offsets);
  parallel_for(per.size(), [&](std::size_t k) {
    const std::size_t i = k / offsets, j = k % offsets;
    const double e = grid.epsilons[i];
    per[k] = static_cast<double>(detail::count_cells(poly, e, (shifts[j].first - 0.5) * e + bb.xmin,
                                                     (shifts[j].second - 0.5) * e + bb.ymin));
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (int j = 0; j < offsets; ++j) s += per[i * offsets + j];
    out.counts[i] = s / offsets;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fits

enum class FitModel { power_law, finite_size };

inline const char* to_string(FitModel m) { return m == FitModel::power_law ? "power-law" : "finite-size"; }

enum class DimensionMethod { box_count, sausage_slope };

inline const char* to_string(DimensionMethod m) {
  return m == DimensionMethod::box_count ? "box-count" : "sausage-slope";
}

struct DimensionEstimate {
  double d_hat = 0.0;
  double stderr_d = 0.0;
  double eps_hi = 0.0;  // fit window
  double eps_lo = 0.0;
  double r_squared = 0.0;
  DimensionMethod method = DimensionMethod::box_count;
  FitModel model = FitModel::power_law;
  bool inconclusive = false;
  std::size_t points_used = 0;
};

struct LineFit {
  double slope = 0.0, intercept = 0.0, stderr_slope = 0.0, r_squared = 0.0, sse = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  LineFit f;
  if (n < 2) return f;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.sse += r * r;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - f.sse / syy, 0.0, 1.0) : 1.0;
  f.stderr_slope = (n > 2 && sxx > 0.0) ? std::sqrt(f.sse / (n - 2) / sxx) : 0.0;
  return f;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  const double hi = v[m];
  if (v.size() % 2) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + m));
}

namespace detail {

inline void check_scaling_data(const std::vector<double>& eps, const std::vector<double>& y) {
  if (eps.size() != y.size()) throw InputError("scale and value arrays differ in length");
  if (eps.size() < 8) throw InputError("need at least 8 (eps, value) pairs");
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i]))
      throw InputError("scales and values must be positive and finite");
}

}  // namespace detail

// Slope of log N against log(1/eps) over the longest run of local slopes
// that stay within +-tol of the run's own median. Ties prefer finer scales.
inline DimensionEstimate estimate_dimension(const std::vector<double>& eps, const std::vector<double>& counts,
                                            double tol = 0.05) {
  detail::check_scaling_data(eps, counts);
  const std::size_t m = eps.size();
  std::vector<double> lx(m), ly(m), s(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    lx[i] = -std::log(eps[i]);
    ly[i] = std::log(counts[i]);
  }
  for (std::size_t i = 0; i + 1 < m; ++i) s[i] = (ly[i + 1] - ly[i]) / (lx[i + 1] - lx[i]);
  std::size_t best_i = 0, best_len = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i; j < s.size(); ++j) {
      const std::vector<double> run(s.begin() + i, s.begin() + j + 1);
      const double med = median(run);
      bool ok = true;
      for (double v : run) ok = ok && std::abs(v - med) <= tol;
      if (!ok) break;
      const std::size_t len = j - i + 1;
      const double fine_new = std::max(eps[i], eps[j + 1]) > 0 ? std::min(eps[i], eps[j + 1]) : 0.0;
      const double fine_old = best_len ? std::min(eps[best_i], eps[best_i + best_len]) : 0.0;
      if (len > best_len || (len == best_len && fine_new < fine_old)) {
        best_len = len;
        best_i = i;
      }
    }
  DimensionEstimate d;
  d.method = DimensionMethod::box_count;
  d.model = FitModel::power_law;
  d.inconclusive = best_len < 3;
  std::size_t a = best_i, b = best_i + best_len;  // point indices
  if (d.inconclusive) {
    a = 0;
    b = m - 1;
  }
  const std::vector<double> X(lx.begin() + a, lx.begin() + b + 1), Y(ly.begin() + a, ly.begin() + b + 1);
  const auto f = fit_line(X, Y);
  d.d_hat = f.slope;
  d.stderr_d = f.stderr_slope;
  d.r_squared = f.r_squared;
  d.eps_hi = std::max(eps[a], eps[b]);
  d.eps_lo = std::min(eps[a], eps[b]);
  d.points_used = b - a + 1;
  return d;
}

// Finite-size model for quantities measured on truncated curves:
//   value(eps) = a eps^(p - d) [log(L/eps)]^l + b eps^(p - 1) + c eps^(p - 2)
// with p = 2 for neighbourhood areas and p = 0 for box counts. The b term
// carries the length of the missing smooth part, the c term the area of
// the missing core. a, b, c enter linearly and are solved by weighted least
// squares with relative residuals.
struct FiniteSizeFit {
  double d = 0.0;
  double l = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
  double sse = std::numeric_limits<double>::infinity();  // relative residuals
  bool valid = false;
};

namespace detail {

inline FiniteSizeFit solve_finite_size(const std::vector<double>& eps, const std::vector<double>& y, double p,
                                       double d, double l, double log_scale, bool with_c) {
  const auto m = static_cast<Eigen::Index>(eps.size());
  // at d = 1 (d = 2) the b (c) column coincides with the leading term
  const bool use_b = !(l == 0.0 && d == 1.0);
  with_c = with_c && !(l == 0.0 && d == 2.0);
  const int k = 1 + use_b + with_c;
  Eigen::MatrixXd A(m, k);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double e = eps[i];
    const double w = 1.0 / y[i];
    double lg = 1.0;
    if (l != 0.0) lg = std::pow(std::log(log_scale / e), l);
    int j = 0;
    A(i, j++) = w * std::pow(e, p - d) * lg;
    if (use_b) A(i, j++) = w * std::pow(e, p - 1.0);
    if (with_c) A(i, j++) = w * std::pow(e, p - 2.0);
    rhs(i) = 1.0;
  }
  // column scaling keeps the problem well conditioned across decades
  Eigen::VectorXd scale(k);
  for (int j = 0; j < k; ++j) {
    scale(j) = A.col(j).norm();
    if (scale(j) > 0.0) A.col(j) /= scale(j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  Eigen::VectorXd x = qr.solve(rhs);
  for (int j = 0; j < k; ++j)
    if (scale(j) > 0.0) x(j) /= scale(j);
  FiniteSizeFit f;
  f.d = d;
  f.l = l;
  f.a = x(0);
  f.b = use_b ? x(1) : 0.0;
  f.c = with_c ? x(k - 1) : 0.0;
  double sse = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double e = eps[i];
    double lg = l != 0.0 ? std::pow(std::log(log_scale / e), l) : 1.0;
    const double model = f.a * std::pow(e, p - d) * lg + f.b * std::pow(e, p - 1.0) + f.c * std::pow(e, p - 2.0);
    const double r = (y[i] - model) / y[i];
    sse += r * r;
  }
  f.sse = sse;
  f.valid = f.a > 0.0 && std::isfinite(sse);
  return f;
}

template <class F>
double golden_min(F&& f, double lo, double hi, int iters = 60) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

// Minimizes over one scalar parameter on [lo, hi] by a coarse scan followed
// by golden-section refinement in the best bracket.
template <class F>
double scan_min(F&& f, double lo, double hi, int steps) {
  double best = lo, best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / steps;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best = x;
    }
  }
  if (!std::isfinite(best_v)) return best;
  const double h = (hi - lo) / steps;
  return golden_min(f, std::max(lo, best - h), std::min(hi, best + h));
}

}  // namespace detail

// Fits d (and optionally l) of the finite-size model.
inline FiniteSizeFit fit_finite_size(const std::vector<double>& eps, const std::vector<double>& y, double p,
                                     double d_lo, double d_hi, std::optional<double> fixed_d = std::nullopt,
                                     bool fit_log = false, double log_scale = 1.0) {
  detail::check_scaling_data(eps, y);
  auto objective_d = [&](double d) {
    const auto f = detail::solve_finite_size(eps, y, p, d, 0.0, log_scale, true);
    return f.valid ? f.sse : std::numeric_limits<double>::infinity();
  };
  const double d = fixed_d ? *fixed_d : detail::scan_min(objective_d, d_lo, d_hi, 400);
  if (!fit_log) return detail::solve_finite_size(eps, y, p, d, 0.0, log_scale, true);
  auto objective_l = [&](double l) {
    const auto f = detail::solve_finite_size(eps, y, p, d, l, log_scale, true);
    return f.valid ? f.sse : std::numeric_limits<double>::infinity();
  };
  const double l = detail::scan_min(objective_l, -4.0, 4.0, 160);
  return detail::solve_finite_size(eps, y, p, d, l, log_scale, true);
}

// Dimension from box counts using the finite-size model when it explains
// the data clearly better than a single power law (Akaike criterion), and
// the plain power law over the whole grid otherwise.
inline DimensionEstimate estimate_dimension_corrected(const std::vector<double>& eps,
                                                      const std::vector<double>& values,
                                                      DimensionMethod method = DimensionMethod::box_count) {
  detail::check_scaling_data(eps, values);
  const double p = method == DimensionMethod::box_count ? 0.0 : 2.0;
  const std::size_t m = eps.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    lx[i] = -std::log(eps[i]);
    ly[i] = std::log(values[i]);
  }
  const auto line = fit_line(lx, ly);
  DimensionEstimate out;
  out.method = method;
  out.eps_hi = *std::max_element(eps.begin(), eps.end());
  out.eps_lo = *std::min_element(eps.begin(), eps.end());
  out.points_used = m;
  // a pure power law of exponent s: count ~ eps^-s, area ~ eps^(2 - s)
  const double plain_d = method == DimensionMethod::box_count ? line.slope : 2.0 + line.slope;
  // the correction columns are subleading only for d >= 1 (box counts) or
  // d >= 0 (areas); below that the eps^-1 column would carry the dimension
  const auto fs = fit_finite_size(eps, values, p, p == 0.0 ? 1.0 : 0.0, 2.0);
  const double n = static_cast<double>(m);
  // relative residuals of the power law are log residuals to first order
  const double aic_plain = n * std::log(std::max(line.sse, 1e-300) / n) + 2.0 * 2.0;
  const double aic_fs = fs.valid ? n * std::log(std::max(fs.sse, 1e-300) / n) + 2.0 * 4.0
                                 : std::numeric_limits<double>::infinity();
  if (fs.valid && aic_fs < aic_plain) {
    out.model = FitModel::finite_size;
    out.d_hat = fs.d;
    // curvature of the profile objective gives the standard error of d
    const double h = 1e-3;
    auto obj = [&](double d) { return detail::solve_finite_size(eps, values, p, d, 0.0, 1.0, true).sse; };
    const double s0 = fs.sse, sp = obj(fs.d + h), sm = obj(fs.d - h);
    const double curv = (sp - 2.0 * s0 + sm) / (h * h);
    const double sigma2 = s0 / std::max(1.0, n - 4.0);
    out.stderr_d = curv > 0.0 ? std::sqrt(2.0 * sigma2 / curv) : std::numeric_limits<double>::infinity();
    double syy = 0.0;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    for (double v : ly) syy += (v - my) * (v - my);
    out.r_squared = syy > 0.0 ? std::clamp(1.0 - fs.sse / syy, 0.0, 1.0) : 1.0;
  } else {
    out.model = FitModel::power_law;
    out.d_hat = plain_d;
    out.stderr_d = line.stderr_slope;
    out.r_squared = line.r_squared;
  }
  out.d_hat = std::clamp(out.d_hat, 0.0, 2.0);
  return out;
}

// ---------------------------------------------------------------------------
// Neighbourhood area

namespace detail {

// x-extent of {p : dist(p, segment ab) <= eps} on the line y = y0.
inline bool capsule_chord(const Vec2& a, const Vec2& b, double eps, double y0, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  auto disk = [&](const Vec2& c) {
    const double dy = y0 - c.y;
    if (std::abs(dy) > eps) return;
    const double w = std::sqrt(eps * eps - dy * dy);
    lo = std::min(lo, c.x - w);
    hi = std::max(hi, c.x + w);
  };
  disk(a);
  disk(b);
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (len > 0.0) {
    // rectangle with corners a +- eps n, b +- eps n
    const double nx = -dy / len * eps, ny = dx / len * eps;
    const Vec2 c[4] = {{a.x + nx, a.y + ny}, {b.x + nx, b.y + ny}, {b.x - nx, b.y - ny}, {a.x - nx, a.y - ny}};
    for (int i = 0; i < 4; ++i) {
      const Vec2& p = c[i];
      const Vec2& q = c[(i + 1) % 4];
      if ((p.y - y0) * (q.y - y0) > 0.0) continue;
      if (p.y == q.y) {
        if (p.y == y0) {
          lo = std::min({lo, p.x, q.x});
          hi = std::max({hi, p.x, q.x});
        }
        continue;
      }
      const double t = (y0 - p.y) / (q.y - p.y);
      const double x = p.x + t * (q.x - p.x);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  return lo <= hi;
}

}  // namespace detail

struct SausageConfig {
  int rows_per_eps = 8;              // row spacing eps / rows_per_eps
  std::size_t max_rows = 40000000;   // raster memory cap
  std::size_t block_rows = 64;
};

// Area of the eps-neighbourhood. Rows of height <= eps/8 are cut by exact
// capsule chords around every segment and the chords merged per row, so
// the only discretization is the midpoint rule across rows.
inline double sausage_area(const Polyline& input, double eps, const SausageConfig& cfg = {}) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("eps must be positive");
  if (input.empty()) throw InputError("sausage_area of an empty polyline");
  validate_finite(input);
  // scan across the axis that cuts fewer chords; the area is unchanged by
  // swapping coordinates
  double cut_rows = 0.0, cut_cols = 0.0;
  for (std::size_t i = 0; i + 1 < input.size(); ++i) {
    cut_rows += std::abs(input.points[i + 1].y - input.points[i].y);
    cut_cols += std::abs(input.points[i + 1].x - input.points[i].x);
  }
  const auto bb0 = bounding_box(input);
  cut_rows += bb0.height();
  cut_cols += bb0.width();
  Polyline swapped;
  if (cut_cols < cut_rows) {
    swapped = input;
    for (auto& v : swapped.points) std::swap(v.x, v.y);
  }
  const Polyline& poly = cut_cols < cut_rows ? swapped : input;
  const auto bb = bounding_box(poly);
  const double y_start = bb.ymin - eps;
  const double span = bb.height() + 2.0 * eps;
  const double rows_d = std::ceil(span / (eps / cfg.rows_per_eps));
  if (rows_d > static_cast<double>(cfg.max_rows)) throw BudgetError("sausage raster memory cap exceeded");
  const std::size_t rows = std::max<std::size_t>(1, static_cast<std::size_t>(rows_d));
  const double dy = span / rows;
  // segments (a point set uses degenerate segments)
  std::vector<std::pair<Vec2, Vec2>> segs;
  const auto& p = poly.points;
  if (!poly.segments || p.size() == 1) {
    for (const auto& v : p) segs.push_back({v, v});
  } else {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) segs.push_back({p[i], p[i + 1]});
  }
  const std::size_t B = cfg.block_rows;
  const std::size_t nblocks = (rows + B - 1) / B;
  std::vector<std::vector<std::uint32_t>> block_segs(nblocks);
  auto row_of = [&](double y) { return (y - y_start) / dy - 0.5; };
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const double y0 = std::min(segs[s].first.y, segs[s].second.y) - eps;
    const double y1 = std::max(segs[s].first.y, segs[s].second.y) + eps;
    const auto r0 = static_cast<std::int64_t>(std::max(0.0, std::ceil(row_of(y0))));
    const auto r1 = static_cast<std::int64_t>(std::min<double>(rows - 1, std::floor(row_of(y1))));
    if (r1 < r0) continue;
    for (std::int64_t b = r0 / static_cast<std::int64_t>(B); b <= r1 / static_cast<std::int64_t>(B); ++b)
      block_segs[b].push_back(static_cast<std::uint32_t>(s));
  }
  std::vector<double> block_area(nblocks, 0.0);
  parallel_for(nblocks, [&](std::size_t b) {
    const std::size_t first = b * B, last = std::min(rows, first + B);
    std::vector<std::vector<std::pair<double, double>>> chords(last - first);
    for (std::uint32_t s : block_segs[b]) {
      const auto& [a, c] = segs[s];
      const double y0 = std::min(a.y, c.y) - eps;
      const double y1 = std::max(a.y, c.y) + eps;
      const auto r0 = static_cast<std::int64_t>(std::max<double>(first, std::ceil(row_of(y0))));
      const auto r1 = static_cast<std::int64_t>(std::min<double>(last - 1, std::floor(row_of(y1))));
      for (std::int64_t r = r0; r <= r1; ++r) {
        const double y = y_start + (r + 0.5) * dy;
        double lo, hi;
        if (detail::capsule_chord(a, c, eps, y, lo, hi)) chords[r - first].push_back({lo, hi});
      }
    }
    double area = 0.0;
    for (auto& row : chords) {
      if (row.empty()) continue;
      std::sort(row.begin(), row.end());
      double cur_lo = row[0].first, cur_hi = row[0].second, len = 0.0;
      for (std::size_t i = 1; i < row.size(); ++i) {
        if (row[i].first > cur_hi) {
          len += cur_hi - cur_lo;
          cur_lo = row[i].first;
          cur_hi = row[i].second;
        } else {
          cur_hi = std::max(cur_hi, row[i].second);
        }
      }
      len += cur_hi - cur_lo;
      area += len * dy;
    }
    block_area[b] = area;
  });
  return std::accumulate(block_area.begin(), block_area.end(), 0.0);
}

inline std::vector<double> sausage_areas(const Polyline& poly, const EpsilonGrid& grid,
                                         const SausageConfig& cfg = {}) {
  std::vector<double> out;
  for (double e : grid.epsilons) out.push_back(sausage_area(poly, e, cfg));
  return out;
}

// ---------------------------------------------------------------------------
// Content

enum class ContentVerdict { nondegenerate, degenerate_infinity, degenerate_zero, inconclusive };

inline const char* to_string(ContentVerdict v) {
  switch (v) {
    case ContentVerdict::nondegenerate: return "nondegenerate";
    case ContentVerdict::degenerate_infinity: return "degenerate-infinity";
    case ContentVerdict::degenerate_zero: return "degenerate-zero";
    case ContentVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct VerdictThresholds {
  double nondegenerate = 0.25;
  double degenerate = 0.5;
};

inline ContentVerdict classify_log_exponent(double l, const VerdictThresholds& t = {}) {
  if (std::abs(l) <= t.nondegenerate) return ContentVerdict::nondegenerate;
  if (l >= t.degenerate) return ContentVerdict::degenerate_infinity;
  if (l <= -t.degenerate) return ContentVerdict::degenerate_zero;
  return ContentVerdict::inconclusive;
}

struct ContentEstimate {
  double d_used = 0.0;
  double M_hat = 0.0;              // median corrected ratio over the finest third
  double M_raw = 0.0;              // same for the uncorrected ratio
  double log_exponent_hat = 0.0;   // l in |A_eps| / eps^(2-d) ~ log(1/eps)^l
  double log_slope_raw = 0.0;      // slope of log ratio against log log(1/eps), finest half
  double correction_share = 0.0;   // median |b eps + c| / area over the finest third
  bool log_exponent_from_fit = false;
  ContentVerdict verdict = ContentVerdict::inconclusive;
  std::vector<double> epsilons;
  std::vector<double> areas;
  std::vector<double> ratios;            // |A_eps| / eps^(2-d)
  std::vector<double> corrected_ratios;  // finite-size terms removed
  double missing_length_term = 0.0;      // b of the finite-size model
  double missing_core_term = 0.0;        // c of the finite-size model
};

// When the finite-size terms are a small share of the fine-scale areas the
// log exponent is read directly from the fine-scale ratios, which is more
// stable than the joint fit. Otherwise the joint fit over l is used.
inline ContentEstimate content_from_areas(const std::vector<double>& eps, const std::vector<double>& areas, double d,
                                          double log_scale, const VerdictThresholds& th = {},
                                          double max_correction_share = 0.05) {
  detail::check_scaling_data(eps, areas);
  if (!(d >= 0.0 && d <= 2.0)) throw InputError("d must lie in [0, 2]");
  ContentEstimate c;
  c.d_used = d;
  c.epsilons = eps;
  c.areas = areas;
  const std::size_t m = eps.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return eps[i] < eps[j]; });
  const std::size_t third = std::max<std::size_t>(1, m / 3);
  const auto fs = fit_finite_size(eps, areas, 2.0, d, d, d, false, log_scale);
  c.missing_length_term = fs.b;
  c.missing_core_term = fs.c;
  std::vector<double> fine_raw, fine_cor, share;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = eps[i];
    const double denom = std::pow(e, 2.0 - d);
    c.ratios.push_back(areas[i] / denom);
    c.corrected_ratios.push_back(std::max(0.0, (areas[i] - fs.b * e - fs.c) / denom));
  }
  for (std::size_t k = 0; k < third; ++k) {
    const auto i = order[k];
    fine_raw.push_back(c.ratios[i]);
    fine_cor.push_back(c.corrected_ratios[i]);
    share.push_back(std::abs(fs.b * eps[i] + fs.c) / areas[i]);
  }
  c.M_raw = median(fine_raw);
  c.M_hat = median(fine_cor);
  c.correction_share = median(share);
  const std::size_t half = std::max<std::size_t>(2, m / 2);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < half && k < m; ++k) {
    const auto i = order[k];
    lx.push_back(std::log(std::log(log_scale / eps[i])));
    ly.push_back(std::log(c.ratios[i]));
  }
  c.log_slope_raw = fit_line(lx, ly).slope;
  c.log_exponent_hat = c.log_slope_raw;
  if (c.correction_share > max_correction_share) {
    const auto joint = fit_finite_size(eps, areas, 2.0, d, d, d, true, log_scale);
    if (joint.valid) {
      c.log_exponent_hat = joint.l;
      c.log_exponent_from_fit = true;
    }
  }
  c.verdict = classify_log_exponent(c.log_exponent_hat, th);
  return c;
}

// Content at dimension d. Scales are measured relative to the polyline's
// diameter in the log factor so the estimate does not depend on units.
inline ContentEstimate estimate_content(const Polyline& poly, double d, const EpsilonGrid& grid,
                                        const SausageConfig& cfg = {}, const VerdictThresholds& th = {}) {
  const auto areas = sausage_areas(poly, grid, cfg);
  const double diam = bounding_box(poly).diameter();
  return content_from_areas(grid.epsilons, areas, d, std::max(diam, grid.epsilons.front() * 2.0), th);
}

// ---------------------------------------------------------------------------
// Radial analysis of spirals r = f(phi)

struct SpiralRadialReport {
  std::vector<double> epsilons;
  std::vector<double> phi2;           // critical winding angle per eps
  std::vector<double> nucleus_area;   // disk of radius f(phi2) + eps
  std::vector<double> tail_area;      // 2 eps * integral of f over [phi1, phi2]
  std::vector<double> radial_area;    // area of the radial eps-neighbourhood
};

namespace detail {

struct RadialSamples {
  const std::vector<double>& phi;
  const std::vector<double>& r;

  double at(double x) const {
    auto it = std::upper_bound(phi.begin(), phi.end(), x);
    if (it == phi.begin()) return r.front();
    if (it == phi.end()) return r.back();
    const auto j = static_cast<std::size_t>(it - phi.begin());
    const double t = (x - phi[j - 1]) / (phi[j] - phi[j - 1]);
    return r[j - 1] + t * (r[j] - r[j - 1]);
  }
};

inline void check_radial_samples(const std::vector<double>& phi, const std::vector<double>& r) {
  if (phi.size() != r.size() || phi.size() < 2) throw InputError("radius samples need matching phi and r, at least 2");
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!std::isfinite(phi[i]) || !std::isfinite(r[i]) || r[i] < 0.0) throw InputError("radius samples must be finite, r >= 0");
    if (i > 0 && !(phi[i] > phi[i - 1])) throw InputError("phi samples must be strictly increasing");
    if (i > 0 && r[i] > r[i - 1]) throw InputError("radius is not monotone non-increasing");
  }
}

}  // namespace detail

// Area of the set of points (rho, theta) with |rho - f(phi)| < eps for some
// phi = theta mod 2 pi in the sampled range: the union of radial intervals
// over all windings, integrated in polar coordinates.
inline double radial_sausage_area(const std::vector<double>& phi, const std::vector<double>& r, double eps,
                                  int angular_steps = 2048) {
  detail::check_radial_samples(phi, r);
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  const double two_pi = 2.0 * std::numbers::pi;
  const detail::RadialSamples f{phi, r};
  const double lo_phi = phi.front(), hi_phi = phi.back();
  const double dtheta = two_pi / angular_steps;
  std::vector<double> partial(static_cast<std::size_t>(angular_steps), 0.0);
  parallel_for(static_cast<std::size_t>(angular_steps), [&](std::size_t s) {
    const double theta = (static_cast<double>(s) + 0.5) * dtheta;
    std::vector<std::pair<double, double>> iv;
    // first phi >= lo_phi congruent to theta
    double x = theta + two_pi * std::ceil((lo_phi - theta) / two_pi);
    for (; x <= hi_phi; x += two_pi) {
      const double rho = f.at(x);
      iv.emplace_back(std::max(0.0, rho - eps), rho + eps);
    }
    std::sort(iv.begin(), iv.end());
    double area = 0.0;
    std::size_t i = 0;
    while (i < iv.size()) {
      double a = iv[i].first, b = iv[i].second;
      for (++i; i < iv.size() && iv[i].first <= b; ++i) b = std::max(b, iv[i].second);
      area += 0.5 * (b * b - a * a);
    }
    partial[s] = area * dtheta;
  });
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

// Splits the radial neighbourhood at phi2(eps), the smallest angle after
// which consecutive windings are at most 2 eps apart. Beyond phi2 the
// windings overlap into a disk (nucleus); before it they are separate
// strips of width 2 eps (tail).
inline SpiralRadialReport spiral_radial_analysis(const std::vector<double>& phi, const std::vector<double>& r,
                                                 const EpsilonGrid& grid, int angular_steps = 2048) {
  detail::check_radial_samples(phi, r);
  const double two_pi = 2.0 * std::numbers::pi;
  const detail::RadialSamples f{phi, r};
  const std::size_t n = phi.size();
  std::vector<double> gap;  // f(psi) - f(psi + 2 pi) where defined
  for (std::size_t i = 0; i < n && phi[i] + two_pi <= phi.back(); ++i) gap.push_back(r[i] - f.at(phi[i] + two_pi));
  // running integral of f by the trapezoid rule
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + 0.5 * (r[i] + r[i - 1]) * (phi[i] - phi[i - 1]);
  SpiralRadialReport rep;
  for (double eps : grid.epsilons) {
    std::size_t k = 0;  // first index after the last gap above 2 eps
    for (std::size_t i = gap.size(); i-- > 0;)
      if (gap[i] > 2.0 * eps) {
        k = i + 1;
        break;
      }
    k = std::min(k, n - 1);
    const double rad = r[k] + eps;
    rep.epsilons.push_back(eps);
    rep.phi2.push_back(phi[k]);
    rep.nucleus_area.push_back(std::numbers::pi * rad * rad);
    rep.tail_area.push_back(2.0 * eps * cum[k]);
    rep.radial_area.push_back(radial_sausage_area(phi, r, eps, angular_steps));
  }
  return rep;
}

}  // namespace oscfrac
