#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "oscfrac/error.hpp"

namespace oscfrac {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Ordered vertices. With segments == false the vertices are an unconnected
// point set (used for sequences such as {k^-a}).
struct Polyline {
  std::vector<Vec2> points;
  bool segments = true;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct BoundingBox {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diameter() const { return std::hypot(width(), height()); }
};

inline BoundingBox bounding_box(const Polyline& p) {
  if (p.empty()) throw InputError("bounding box of an empty polyline");
  BoundingBox b{p.points[0].x, p.points[0].x, p.points[0].y, p.points[0].y};
  for (const auto& v : p.points) {
    b.xmin = std::min(b.xmin, v.x);
    b.xmax = std::max(b.xmax, v.x);
    b.ymin = std::min(b.ymin, v.y);
    b.ymax = std::max(b.ymax, v.y);
  }
  return b;
}

inline double polyline_length(const Polyline& p) {
  if (!p.segments) return 0.0;
  double L = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i)
    L += std::hypot(p.points[i].x - p.points[i - 1].x, p.points[i].y - p.points[i - 1].y);
  return L;
}

inline Polyline scaled(const Polyline& p, double lambda) {
  Polyline q = p;
  for (auto& v : q.points) {
    v.x *= lambda;
    v.y *= lambda;
  }
  return q;
}

inline void validate_finite(const Polyline& p) {
  for (const auto& v : p.points)
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw InputError("polyline has non-finite coordinates");
}

}  // namespace oscfrac
