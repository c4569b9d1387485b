#pragma once

// Reference implementations used only by the test suite. Each one trades
// speed for an independent construction so library results can be checked
// against arithmetic that cannot silently agree with the implementation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "threatgrid/clustering.hpp"
#include "threatgrid/geometry.hpp"
#include "threatgrid/grid.hpp"

namespace tg = threatgrid;

namespace oracle {

using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(double v) { return Rat(v); }

// Sign of the cross product (q - p) x (r - p) in exact rational arithmetic.
inline int orient_sign_exact(tg::Point2 p, tg::Point2 q, tg::Point2 r) {
  const Rat cross = (rat(q.x) - rat(p.x)) * (rat(r.y) - rat(p.y)) -
                    (rat(q.y) - rat(p.y)) * (rat(r.x) - rat(p.x));
  if (cross > 0) return 1;
  if (cross < 0) return -1;
  return 0;
}

// Magnitude of the same cross product, evaluated in doubles. Used to decide
// whether a configuration sits inside the tolerance band where the double
// implementation is allowed to disagree with exact arithmetic.
inline double min_orientation_magnitude(const tg::Segment& s1, const tg::Segment& s2) {
  const auto mag = [](tg::Point2 p, tg::Point2 q, tg::Point2 r) {
    return std::abs((q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x));
  };
  return std::min(std::min(mag(s1.a, s1.b, s2.a), mag(s1.a, s1.b, s2.b)),
                  std::min(mag(s2.a, s2.b, s1.a), mag(s2.a, s2.b, s1.b)));
}

// Proper intersection via the parametric form: p = a + t (b - a) on one
// segment, p = c + u (d - c) on the other. A proper crossing needs a nonzero
// denominator and both parameters strictly inside (0, 1); collinear and
// endpoint contact fall out of those bounds automatically.
inline bool segments_properly_intersect_exact(const tg::Segment& s1, const tg::Segment& s2) {
  const Rat rx = rat(s1.b.x) - rat(s1.a.x);
  const Rat ry = rat(s1.b.y) - rat(s1.a.y);
  const Rat sx = rat(s2.b.x) - rat(s2.a.x);
  const Rat sy = rat(s2.b.y) - rat(s2.a.y);
  const Rat denom = rx * sy - ry * sx;
  if (denom == 0) return false;
  const Rat qpx = rat(s2.a.x) - rat(s1.a.x);
  const Rat qpy = rat(s2.a.y) - rat(s1.a.y);
  const Rat t_num = qpx * sy - qpy * sx;
  const Rat u_num = qpx * ry - qpy * rx;
  const auto strictly_inside = [&](const Rat& num) {
    if (denom > 0) return num > 0 && num < denom;
    return num < 0 && num > denom;
  };
  return strictly_inside(t_num) && strictly_inside(u_num);
}

// Boundary-inclusive point containment for a CCW-ordered convex polygon,
// decided with exact orientation signs.
inline bool point_in_convex_exact(tg::Point2 p, std::span<const tg::Point2> hull) {
  if (hull.empty()) return false;
  if (hull.size() == 1) return rat(p.x) == rat(hull[0].x) && rat(p.y) == rat(hull[0].y);
  if (hull.size() == 2) {
    if (orient_sign_exact(hull[0], hull[1], p) != 0) return false;
    const Rat dot = (rat(p.x) - rat(hull[0].x)) * (rat(hull[1].x) - rat(hull[0].x)) +
                    (rat(p.y) - rat(hull[0].y)) * (rat(hull[1].y) - rat(hull[0].y));
    const Rat len_sq = (rat(hull[1].x) - rat(hull[0].x)) * (rat(hull[1].x) - rat(hull[0].x)) +
                       (rat(hull[1].y) - rat(hull[0].y)) * (rat(hull[1].y) - rat(hull[0].y));
    return dot >= 0 && dot <= len_sq;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const tg::Point2 a = hull[i];
    const tg::Point2 b = hull[(i + 1) % hull.size()];
    if (orient_sign_exact(a, b, p) < 0) return false;
  }
  return true;
}

// Orientation sign with a certified double fast path. The rounding error of
// the double cross product stays below 64 * max_coord^2 * 2^-53, which the
// guard exceeds by a wide margin, so any magnitude above the guard already
// decides the sign; only the remainder needs rational arithmetic.
inline int orient_sign_certified(tg::Point2 p, tg::Point2 q, tg::Point2 r) {
  const double cross = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  const double m = std::max({std::abs(p.x), std::abs(p.y), std::abs(q.x), std::abs(q.y),
                             std::abs(r.x), std::abs(r.y)});
  const double guard = m * m * 0x1p-40;
  if (cross > guard) return 1;
  if (cross < -guard) return -1;
  return orient_sign_exact(p, q, r);
}

// Convex hull vertices by interior elimination: a point is a vertex exactly
// when no triangle formed by three other input points strictly contains it.
// O(n^4), usable only for small n. Returns the vertex set sorted by (x, y);
// points in the strict interior of an edge survive here, so callers should
// stick to inputs in general position when comparing against convex_hull.
inline std::vector<tg::Point2> hull_vertices_bruteforce(std::vector<tg::Point2> pts) {
  const auto lex_less = [](tg::Point2 a, tg::Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  };
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](tg::Point2 a, tg::Point2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 4) {
    if (pts.size() == 3 && orient_sign_certified(pts[0], pts[1], pts[2]) == 0) {
      // A collinear triple degenerates to its extreme pair; lex order puts
      // the middle point at index 1.
      return {pts[0], pts[2]};
    }
    return pts;
  }
  const auto strictly_in_triangle = [](tg::Point2 p, tg::Point2 a, tg::Point2 b, tg::Point2 c) {
    const int s1 = orient_sign_certified(a, b, p);
    const int s2 = orient_sign_certified(b, c, p);
    const int s3 = orient_sign_certified(c, a, p);
    return (s1 > 0 && s2 > 0 && s3 > 0) || (s1 < 0 && s2 < 0 && s3 < 0);
  };
  std::vector<tg::Point2> vertices;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool interior = false;
    for (std::size_t a = 0; a < pts.size() && !interior; ++a) {
      if (a == i) continue;
      for (std::size_t b = a + 1; b < pts.size() && !interior; ++b) {
        if (b == i) continue;
        for (std::size_t c = b + 1; c < pts.size() && !interior; ++c) {
          if (c == i) continue;
          interior = strictly_in_triangle(pts[i], pts[a], pts[b], pts[c]);
        }
      }
    }
    if (!interior) vertices.push_back(pts[i]);
  }
  return vertices;
}

// O(n^2) density clustering with the same parameters and border rule as
// dbscan, but built on union-find over core pairs instead of a frontier
// expansion. Returns each cluster's members sorted ascending, with the
// clusters ordered by their smallest member.
inline std::vector<std::vector<tg::CellIndex>> dbscan_reference(const tg::GridFrame& frame,
                                                                std::span<const tg::CellIndex> cells,
                                                                double eps, int min_pts) {
  std::vector<tg::CellIndex> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::size_t n = sorted.size();
  const double eps_sq = eps * eps;
  const auto within = [&](std::size_t i, std::size_t j) {
    const tg::Vec2 d = frame.at(sorted[j].row, sorted[j].col).pos -
                       frame.at(sorted[i].row, sorted[i].col).pos;
    return tg::norm_sq(d) <= eps_sq;
  };

  std::vector<int> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (within(i, j)) ++degree[i];
    }
  }
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) core[i] = degree[i] >= min_pts;

  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (core[j] && within(i, j)) parent[find(i)] = find(j);
    }
  }

  std::vector<std::vector<tg::CellIndex>> groups;
  std::vector<std::size_t> root_to_group(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const std::size_t root = find(i);
    if (root_to_group[root] == SIZE_MAX) {
      root_to_group[root] = groups.size();
      groups.emplace_back();
    }
    groups[root_to_group[root]].push_back(sorted[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && within(i, j)) {
        groups[root_to_group[find(j)]].push_back(sorted[i]);
        break;
      }
    }
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return groups;
}

// Exact relation between two CCW convex hulls: separating-axis search over
// both edge sets decides disjointness, inclusive vertex containment decides
// nesting, and anything left is a proper boundary crossing. Only meaningful
// away from touching configurations; pair it with min_relation_margin.
enum class HullRelationExact { kDisjoint, kH1ContainsH2, kH2ContainsH1, kEdgeIntersect };

inline HullRelationExact hulls_relate_exact(std::span<const tg::Point2> h1,
                                            std::span<const tg::Point2> h2) {
  const auto separated_by_edge_of = [](std::span<const tg::Point2> edges,
                                       std::span<const tg::Point2> others) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const tg::Point2 a = edges[i];
      const tg::Point2 b = edges[(i + 1) % edges.size()];
      bool all_outside = true;
      for (const tg::Point2 v : others) {
        if (orient_sign_exact(a, b, v) >= 0) {
          all_outside = false;
          break;
        }
      }
      if (all_outside) return true;
    }
    return false;
  };
  if (separated_by_edge_of(h1, h2) || separated_by_edge_of(h2, h1)) {
    return HullRelationExact::kDisjoint;
  }
  const auto contains_all = [](std::span<const tg::Point2> outer, std::span<const tg::Point2> inner) {
    for (const tg::Point2 v : inner) {
      if (!point_in_convex_exact(v, outer)) return false;
    }
    return true;
  };
  if (contains_all(h1, h2)) return HullRelationExact::kH1ContainsH2;
  if (contains_all(h2, h1)) return HullRelationExact::kH2ContainsH1;
  return HullRelationExact::kEdgeIntersect;
}

// Smallest orientation magnitude over all (edge, vertex) pairs of the two
// hulls, in doubles. Small values flag grazing configurations where the
// double classifier may legitimately differ from the exact one.
inline double min_relation_margin(std::span<const tg::Point2> h1, std::span<const tg::Point2> h2) {
  const auto scan = [](std::span<const tg::Point2> edges, std::span<const tg::Point2> points,
                       double current) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const tg::Point2 a = edges[i];
      const tg::Point2 b = edges[(i + 1) % edges.size()];
      for (const tg::Point2 p : points) {
        const double mag = std::abs((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x));
        current = std::min(current, mag);
      }
    }
    return current;
  };
  double margin = std::numeric_limits<double>::infinity();
  margin = scan(h1, h2, margin);
  margin = scan(h2, h1, margin);
  return margin;
}

}  // namespace oracle
