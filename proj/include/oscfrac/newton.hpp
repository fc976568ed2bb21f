#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oscfrac/error.hpp"
#include "oscfrac/phase.hpp"
#include "oscfrac/rational.hpp"

namespace oscfrac {

using RVec = std::vector<Rational>;

struct SupportSet {
  int n = 1;
  std::vector<MultiIndex> points;  // sorted, origin excluded
};

// A facet of the polyhedron with a non-negative normal. The weight is
// scaled to sum 1; `level` is min over the polyhedron of <w, x>.
struct DualVertex {
  RVec weight;
  Rational level;
  std::vector<int> argmin;  // indices into minimal_points
  std::vector<int> zeros;   // axes with zero weight
};

struct NewtonPolyhedron {
  int n = 1;
  std::vector<MultiIndex> minimal_points;
  std::vector<DualVertex> facets;
};

struct CompactFace {
  int dim = 0;
  std::vector<MultiIndex> vertices;
  std::vector<MultiIndex> points;  // all minimal support points on the face
  RVec weight;                     // strictly positive, normalized so level == 1
  Rational level{1};
};

struct DiagramInfo {
  int n = 1;
  std::vector<CompactFace> faces;
  Rational distance;
  Rational remoteness;
  int multiplicity = 0;
  bool is_remote = false;
  int center_face_dim = 0;
  std::optional<std::size_t> center_face;  // index into faces when compact
};

namespace detail {

inline Rational dot(const RVec& w, const MultiIndex& k) {
  Rational s(0);
  for (std::size_t i = 0; i < k.size(); ++i)
    if (k[i] != 0) s += w[i] * Rational(k[i]);
  return s;
}

// Rank of a set of rational vectors by exact elimination.
inline int rational_rank(std::vector<RVec> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows[0].size();
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == Rational(0)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == static_cast<std::size_t>(rank) || rows[r][c] == Rational(0)) continue;
      const Rational f = rows[r][c] / rows[rank][c];
      for (std::size_t j = c; j < cols; ++j) rows[r][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

// Solves the square system A w = b exactly; nullopt if singular.
inline std::optional<RVec> rational_solve(std::vector<RVec> A, RVec b) {
  const std::size_t n = A.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && A[piv][c] == Rational(0)) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(A[piv], A[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == Rational(0)) continue;
      const Rational f = A[r][c] / A[c][c];
      for (std::size_t j = c; j < n; ++j) A[r][j] -= f * A[c][j];
      b[r] -= f * b[c];
    }
  }
  RVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return x;
}

inline int face_dimension(const std::vector<MultiIndex>& pts, const std::vector<int>& zeros, int n) {
  std::vector<RVec> rows;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    RVec r(n);
    for (int j = 0; j < n; ++j) r[j] = Rational(pts[i][j] - pts[0][j]);
    rows.push_back(std::move(r));
  }
  for (int j : zeros) {
    RVec r(n, Rational(0));
    r[j] = Rational(1);
    rows.push_back(std::move(r));
  }
  return rational_rank(std::move(rows));
}

struct Evaluated {
  Rational g;
  std::vector<int> argmin;
  std::vector<int> zeros;
};

inline Evaluated evaluate_weight(const std::vector<MultiIndex>& pts, const RVec& w) {
  Evaluated e;
  bool first = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Rational v = dot(w, pts[i]);
    if (first || v < e.g) {
      e.g = v;
      e.argmin.assign(1, static_cast<int>(i));
      first = false;
    } else if (v == e.g) {
      e.argmin.push_back(static_cast<int>(i));
    }
  }
  for (std::size_t j = 0; j < w.size(); ++j)
    if (w[j] == Rational(0)) e.zeros.push_back(static_cast<int>(j));
  return e;
}

template <class F>
void for_each_combination(int total, int choose, F&& f) {
  std::vector<int> idx(choose);
  for (int i = 0; i < choose; ++i) idx[i] = i;
  if (choose > total) return;
  while (true) {
    f(idx);
    int i = choose - 1;
    while (i >= 0 && idx[i] == total - choose + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < choose; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

inline SupportSet reduced_support(const PolynomialPhase& phase) {
  SupportSet s;
  s.n = phase.dimension();
  const MultiIndex origin(s.n, 0);
  for (const auto& [k, c] : phase.terms())
    if (k != origin) s.points.push_back(k);
  if (s.points.empty()) throw InputError("phase is constant: empty reduced support");
  return s;
}

// Drops every point that dominates another point componentwise.
inline std::vector<MultiIndex> dominance_minimal(const std::vector<MultiIndex>& pts) {
  std::set<MultiIndex> uniq(pts.begin(), pts.end());
  std::vector<MultiIndex> u(uniq.begin(), uniq.end());
  std::vector<MultiIndex> out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < u.size() && !dominated; ++j) {
      if (i == j) continue;
      bool le = true;
      for (std::size_t a = 0; a < u[i].size(); ++a)
        if (u[j][a] > u[i][a]) {
          le = false;
          break;
        }
      dominated = le;
    }
    if (!dominated) out.push_back(u[i]);
  }
  return out;
}

// Lower-left convex staircase of a planar support, ordered by first coordinate.
inline std::vector<MultiIndex> staircase_hull_2d(const std::vector<MultiIndex>& pts) {
  std::vector<MultiIndex> m = dominance_minimal(pts);
  std::sort(m.begin(), m.end());
  std::vector<MultiIndex> hull;
  for (const auto& p : m) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      // keep b only if it lies strictly below the chord a -> p
      const long long cross = static_cast<long long>(b[0] - a[0]) * (p[1] - a[1]) -
                              static_cast<long long>(b[1] - a[1]) * (p[0] - a[0]);
      if (cross <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return hull;
}

inline NewtonPolyhedron newton_polyhedron(const SupportSet& support) {
  if (support.points.empty()) throw InputError("empty support");
  NewtonPolyhedron P;
  P.n = support.n;
  P.minimal_points = dominance_minimal(support.points);
  const int n = P.n;
  const auto& pts = P.minimal_points;
  const int m = static_cast<int>(pts.size());

  // Candidate hyperplanes in weight space: ties between two points, or w_j = 0.
  std::vector<RVec> planes;
  for (int i = 0; i < m; ++i)
    for (int k = i + 1; k < m; ++k) {
      RVec r(n);
      for (int j = 0; j < n; ++j) r[j] = Rational(pts[i][j] - pts[k][j]);
      planes.push_back(std::move(r));
    }
  for (int j = 0; j < n; ++j) {
    RVec r(n, Rational(0));
    r[j] = Rational(1);
    planes.push_back(std::move(r));
  }
  if (planes.size() > 4000) throw BudgetError("support too large for exact face enumeration");

  std::set<RVec> seen;
  auto consider = [&](const RVec& w) {
    for (const auto& x : w)
      if (x < Rational(0)) return;
    if (seen.count(w)) return;
    seen.insert(w);
    auto e = detail::evaluate_weight(pts, w);
    std::vector<MultiIndex> face_pts;
    for (int i : e.argmin) face_pts.push_back(pts[i]);
    if (detail::face_dimension(face_pts, e.zeros, n) != n - 1) return;
    P.facets.push_back({w, e.g, e.argmin, e.zeros});
  };

  if (n == 1) {
    consider(RVec{Rational(1)});
  } else {
    detail::for_each_combination(static_cast<int>(planes.size()), n - 1, [&](const std::vector<int>& idx) {
      std::vector<RVec> A;
      for (int i : idx) A.push_back(planes[i]);
      A.push_back(RVec(n, Rational(1)));
      RVec b(n, Rational(0));
      b[n - 1] = Rational(1);
      if (auto w = detail::rational_solve(A, b)) consider(*w);
    });
  }
  std::sort(P.facets.begin(), P.facets.end(),
            [](const DualVertex& a, const DualVertex& b) { return a.weight < b.weight; });
  return P;
}

inline std::vector<CompactFace> compact_faces(const NewtonPolyhedron& P) {
  const int n = P.n;
  const auto& pts = P.minimal_points;
  const int m = static_cast<int>(pts.size());
  std::map<std::vector<int>, CompactFace> found;
  for (int size = 1; size <= std::min(n, m); ++size) {
    detail::for_each_combination(m, size, [&](const std::vector<int>& T) {
      RVec centroid(n, Rational(0));
      int count = 0;
      for (const auto& f : P.facets) {
        if (!std::includes(f.argmin.begin(), f.argmin.end(), T.begin(), T.end())) continue;
        for (int j = 0; j < n; ++j) centroid[j] += f.weight[j];
        ++count;
      }
      if (count == 0) return;
      for (auto& x : centroid) {
        x /= Rational(count);
        if (x == Rational(0)) return;  // only non-compact faces contain T
      }
      const auto e = detail::evaluate_weight(pts, centroid);
      if (found.count(e.argmin)) return;
      CompactFace face;
      for (int i : e.argmin) face.points.push_back(pts[i]);
      face.dim = detail::face_dimension(face.points, {}, n);
      face.weight = centroid;
      for (auto& x : face.weight) x /= e.g;
      found.emplace(e.argmin, std::move(face));
    });
  }
  std::set<MultiIndex> vertex_set;
  for (const auto& [idx, f] : found)
    if (f.dim == 0) vertex_set.insert(f.points.front());
  std::vector<CompactFace> faces;
  for (auto& [idx, f] : found) {
    for (const auto& p : f.points)
      if (vertex_set.count(p)) f.vertices.push_back(p);
    faces.push_back(std::move(f));
  }
  std::stable_sort(faces.begin(), faces.end(), [](const CompactFace& a, const CompactFace& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.points < b.points;
  });
  return faces;
}

struct DistanceRemoteness {
  Rational c;
  Rational beta;
};

inline DistanceRemoteness distance_and_remoteness(const NewtonPolyhedron& P) {
  if (P.facets.empty()) throw InputError("polyhedron has no facets");
  Rational c = P.facets.front().level;
  for (const auto& f : P.facets) c = std::max(c, f.level);
  return {c, Rational(-1) / c};
}

struct CenterFace {
  int multiplicity = 0;
  int dim = 0;
  std::vector<MultiIndex> points;
  bool compact = true;
};

inline CenterFace locate_center_face(const NewtonPolyhedron& P, const Rational& c) {
  const int n = P.n;
  RVec centroid(n, Rational(0));
  int count = 0;
  for (const auto& f : P.facets)
    if (f.level == c) {
      for (int j = 0; j < n; ++j) centroid[j] += f.weight[j];
      ++count;
    }
  if (count == 0) throw InputError("distance does not match any facet level");
  for (auto& x : centroid) x /= Rational(count);
  const auto e = detail::evaluate_weight(P.minimal_points, centroid);
  CenterFace cf;
  for (int i : e.argmin) cf.points.push_back(P.minimal_points[i]);
  cf.dim = detail::face_dimension(cf.points, e.zeros, n);
  cf.compact = e.zeros.empty();
  cf.multiplicity = n - cf.dim - 1;
  return cf;
}

inline int multiplicity_of_remoteness(const NewtonPolyhedron& P, const Rational& c) {
  return locate_center_face(P, c).multiplicity;
}

inline bool on_some_face(const std::vector<CompactFace>& faces, const MultiIndex& k) {
  for (const auto& f : faces)
    if (detail::dot(f.weight, k) == f.level) return true;
  return false;
}

inline PolynomialPhase principal_part(const PolynomialPhase& phase, const std::vector<CompactFace>& faces) {
  PolynomialPhase out(phase.dimension());
  const MultiIndex origin(phase.dimension(), 0);
  for (const auto& [k, c] : phase.terms())
    if (k != origin && on_some_face(faces, k)) out.add_term(k, c);
  return out;
}

inline PolynomialPhase face_polynomial(const PolynomialPhase& phase, const CompactFace& face) {
  PolynomialPhase out(phase.dimension());
  for (const auto& [k, c] : phase.terms())
    if (detail::dot(face.weight, k) == face.level) out.add_term(k, c);
  return out;
}

inline DiagramInfo newton_diagram(const PolynomialPhase& phase) {
  const auto P = newton_polyhedron(reduced_support(phase));
  DiagramInfo info;
  info.n = P.n;
  info.faces = compact_faces(P);
  const auto dr = distance_and_remoteness(P);
  info.distance = dr.c;
  info.remoteness = dr.beta;
  const auto cf = locate_center_face(P, dr.c);
  info.multiplicity = cf.multiplicity;
  info.center_face_dim = cf.dim;
  info.is_remote = dr.c > Rational(1);
  if (cf.compact)
    for (std::size_t i = 0; i < info.faces.size(); ++i)
      if (info.faces[i].points == cf.points) info.center_face = i;
  return info;
}

struct NondegeneracyReport {
  bool pass = true;
  std::optional<std::size_t> face;  // offending face
  std::vector<double> witness;
  double residual = 0.0;            // relative gradient size at the witness
  double resolution = 0.0;          // grid step used in each coordinate
  std::string message;
};

namespace detail {

// |grad f_face(x)| relative to the sum of absolute term contributions.
inline double relative_gradient(const std::vector<PolynomialPhase>& grad, const std::vector<double>& x) {
  double num = 0.0, den = 0.0;
  for (const auto& g : grad) {
    const double v = eval_phase(g, x);
    num += v * v;
    double s = 0.0;
    for (const auto& [k, c] : g.terms()) {
      double m = std::abs(c);
      for (std::size_t i = 0; i < k.size(); ++i) m *= ipow(std::abs(x[i]), k[i]);
      s += m;
    }
    den += s * s;
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace detail

// Searches for common zeros of the partials of each face polynomial in
// (R \ 0)^n, sampling |x_i| in [1/2, 2] over every sign pattern.
inline NondegeneracyReport r_nondegeneracy_check(const PolynomialPhase& phase,
                                                 const std::vector<CompactFace>& faces,
                                                 int samples = 24) {
  const int n = phase.dimension();
  if (n > 3) throw InputError("nondegeneracy check supports n <= 3");
  NondegeneracyReport rep;
  samples = std::max(samples, 3);
  rep.resolution = 1.5 / (samples - 1);
  const double tol = 1e-9;
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const auto fp = face_polynomial(phase, faces[fi]);
    const auto grad = gradient_polys(fp);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(2 * samples);
    // keep a handful of best grid points for refinement
    std::vector<std::pair<double, std::vector<double>>> best;
    std::vector<double> x(n);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t r = idx;
      for (int i = 0; i < n; ++i) {
        const std::size_t j = r % (2 * samples);
        r /= (2 * samples);
        const double mag = 0.5 + 1.5 * static_cast<double>(j % samples) / (samples - 1);
        x[i] = j < static_cast<std::size_t>(samples) ? mag : -mag;
      }
      const double res = detail::relative_gradient(grad, x);
      if (best.size() < 8 || res < best.back().first) {
        best.emplace_back(res, x);
        std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        if (best.size() > 8) best.pop_back();
      }
    }
    for (const auto& [res0, x0] : best) {
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
      v = detail::levenberg_marquardt(grad, v);
      std::vector<double> xr(v.data(), v.data() + n);
      bool off_axes = true;
      for (double c : xr)
        if (!(std::abs(c) > 1e-3) || !std::isfinite(c)) off_axes = false;
      const double res = detail::relative_gradient(grad, xr);
      const double best_res = std::min(res0, off_axes ? res : res0);
      if (best_res < tol) {
        rep.pass = false;
        rep.face = fi;
        rep.witness = best_res == res0 ? x0 : xr;
        rep.residual = best_res;
        rep.message = "common zero of face partials found";
        return rep;
      }
    }
  }
  rep.message = "no common zero found at resolution " + std::to_string(rep.resolution);
  return rep;
}

}  // namespace oscfrac
