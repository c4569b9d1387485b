#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace threatgrid {

/// Cross products with magnitude at or below this are treated as zero when
/// classifying point orientation. Coordinates are meters, so the unit is m^2.
inline constexpr double kGeomEps = 1e-9;

/// Coincidence tolerance for point-level checks, meters.
inline constexpr double kPointTol = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

using Point2 = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double norm_sq(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline Vec2 rotated(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a = std::numbers::pi;
  return a;
}

struct Segment {
  Point2 a;
  Point2 b;
};

enum class Orientation { kCounterClockwise, kClockwise, kCollinear };

/// Twice the signed area of the triangle (p, q, r).
constexpr double cross3(Point2 p, Point2 q, Point2 r) { return cross(q - p, r - p); }

inline Orientation orient(Point2 p, Point2 q, Point2 r) {
  const double c = cross3(p, q, r);
  if (c > kGeomEps) return Orientation::kCounterClockwise;
  if (c < -kGeomEps) return Orientation::kClockwise;
  return Orientation::kCollinear;
}

/// Proper segment crossing. Touching endpoints, collinear overlap and
/// zero-length segments all report false.
inline bool segments_intersect(const Segment& s1, const Segment& s2) {
  const Orientation o1 = orient(s1.a, s1.b, s2.a);
  const Orientation o2 = orient(s1.a, s1.b, s2.b);
  const Orientation o3 = orient(s2.a, s2.b, s1.a);
  const Orientation o4 = orient(s2.a, s2.b, s1.b);
  if (o1 == Orientation::kCollinear || o2 == Orientation::kCollinear ||
      o3 == Orientation::kCollinear || o4 == Orientation::kCollinear) {
    return false;
  }
  return o1 != o2 && o3 != o4;
}

namespace detail {

/// Bounding-box membership for a point already known collinear with a-b.
inline bool on_segment(Point2 a, Point2 b, Point2 p) {
  return p.x >= std::min(a.x, b.x) - kPointTol && p.x <= std::max(a.x, b.x) + kPointTol &&
         p.y >= std::min(a.y, b.y) - kPointTol && p.y <= std::max(a.y, b.y) + kPointTol;
}

}  // namespace detail

/// Inclusive intersection test: also true for endpoint touches and collinear
/// overlap. Used for diagnostics and ground-truth sweeps, never for threat
/// classification.
inline bool segments_touch(const Segment& s1, const Segment& s2) {
  const Orientation o1 = orient(s1.a, s1.b, s2.a);
  const Orientation o2 = orient(s1.a, s1.b, s2.b);
  const Orientation o3 = orient(s2.a, s2.b, s1.a);
  const Orientation o4 = orient(s2.a, s2.b, s1.b);
  if (o1 != Orientation::kCollinear && o2 != Orientation::kCollinear &&
      o3 != Orientation::kCollinear && o4 != Orientation::kCollinear) {
    return o1 != o2 && o3 != o4;
  }
  if (o1 == Orientation::kCollinear && detail::on_segment(s1.a, s1.b, s2.a)) return true;
  if (o2 == Orientation::kCollinear && detail::on_segment(s1.a, s1.b, s2.b)) return true;
  if (o3 == Orientation::kCollinear && detail::on_segment(s2.a, s2.b, s1.a)) return true;
  if (o4 == Orientation::kCollinear && detail::on_segment(s2.a, s2.b, s1.b)) return true;
  return false;
}

/// Convex polygon in counter-clockwise order. Fewer than three points marks a
/// degenerate hull (a single point or a segment), which is a valid state that
/// downstream predicates handle explicitly.
struct HullPolygon {
  std::vector<Point2> points;

  bool degenerate() const { return points.size() < 3; }
  std::size_t size() const { return points.size(); }
};

/// Minimal counter-clockwise convex hull via the monotone chain. Duplicate
/// input points are merged and collinear boundary points are dropped, so fully
/// collinear input collapses to its two extremes. Throws on an empty input.
inline HullPolygon convex_hull(std::span<const Point2> input) {
  if (input.empty()) throw std::invalid_argument("convex_hull: empty point set");
  std::vector<Point2> pts(input.begin(), input.end());
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n == 1) return HullPolygon{{pts[0]}};

  std::vector<Point2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && orient(h[k - 2], h[k - 1], pts[i]) != Orientation::kCounterClockwise) --k;
    h[k++] = pts[i];
  }
  const std::size_t lower_end = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower_end && orient(h[k - 2], h[k - 1], pts[i]) != Orientation::kCounterClockwise) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return HullPolygon{std::move(h)};
}

inline HullPolygon convex_hull(const std::vector<Point2>& input) {
  return convex_hull(std::span<const Point2>(input));
}

/// Inclusive point containment: boundary points count as inside. Degenerate
/// hulls fall back to point coincidence and segment membership.
inline bool point_in_convex(Point2 p, const HullPolygon& hull) {
  const auto& pts = hull.points;
  if (pts.empty()) return false;
  if (pts.size() == 1) {
    return std::abs(p.x - pts[0].x) <= kPointTol && std::abs(p.y - pts[0].y) <= kPointTol;
  }
  if (pts.size() == 2) {
    return orient(pts[0], pts[1], p) == Orientation::kCollinear &&
           detail::on_segment(pts[0], pts[1], p);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point2 a = pts[i];
    const Point2 b = pts[(i + 1) % pts.size()];
    if (orient(a, b, p) == Orientation::kClockwise) return false;
  }
  return true;
}

enum class HullRelation { kDisjoint, kEdgeIntersect, kH1ContainsH2, kH2ContainsH1 };

namespace detail {

inline std::size_t edge_count(const HullPolygon& h) {
  if (h.points.size() < 2) return 0;
  if (h.points.size() == 2) return 1;
  return h.points.size();
}

inline Segment edge(const HullPolygon& h, std::size_t i) {
  return {h.points[i], h.points[(i + 1) % h.points.size()]};
}

}  // namespace detail

/// Classifies two convex hulls. Edge crossings are checked first; once they
/// are ruled out, convexity makes a single vertex test sufficient for
/// containment. The vertex test is boundary-inclusive, so hulls that only
/// touch may classify as containment; collinear_contact_count surfaces such
/// contact separately.
inline HullRelation hulls_relate(const HullPolygon& h1, const HullPolygon& h2) {
  const std::size_t n1 = detail::edge_count(h1);
  const std::size_t n2 = detail::edge_count(h2);
  for (std::size_t i = 0; i < n1; ++i) {
    const Segment e1 = detail::edge(h1, i);
    for (std::size_t j = 0; j < n2; ++j) {
      if (segments_intersect(e1, detail::edge(h2, j))) return HullRelation::kEdgeIntersect;
    }
  }
  if (!h2.points.empty() && point_in_convex(h2.points[0], h1)) return HullRelation::kH1ContainsH2;
  if (!h1.points.empty() && point_in_convex(h1.points[0], h2)) return HullRelation::kH2ContainsH1;
  return HullRelation::kDisjoint;
}

/// Number of edge pairs that touch without properly crossing (shared
/// endpoints, collinear overlap). Such contact is classified as
/// non-intersecting; callers surface the count as a diagnostic.
inline int collinear_contact_count(const HullPolygon& h1, const HullPolygon& h2) {
  int count = 0;
  const std::size_t n1 = detail::edge_count(h1);
  const std::size_t n2 = detail::edge_count(h2);
  for (std::size_t i = 0; i < n1; ++i) {
    const Segment e1 = detail::edge(h1, i);
    for (std::size_t j = 0; j < n2; ++j) {
      const Segment e2 = detail::edge(h2, j);
      if (!segments_intersect(e1, e2) && segments_touch(e1, e2)) ++count;
    }
  }
  return count;
}

/// Shoelace area; degenerate hulls have zero area.
inline double polygon_area(const HullPolygon& hull) {
  const auto& pts = hull.points;
  if (pts.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point2 a = pts[i];
    const Point2 b = pts[(i + 1) % pts.size()];
    twice += cross(a, b);
  }
  return 0.5 * twice;
}

struct Aabb {
  Point2 min;
  Point2 max;
};

inline Aabb hull_bbox(const HullPolygon& hull) {
  Aabb box{hull.points.front(), hull.points.front()};
  for (const Point2& p : hull.points) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
  }
  return box;
}

}  // namespace threatgrid
