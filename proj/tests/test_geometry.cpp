#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "threatgrid/geometry.hpp"

namespace tg = threatgrid;

namespace {

tg::HullPolygon square(double x0, double y0, double side) {
  return tg::convex_hull(std::vector<tg::Point2>{
      {x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}

std::vector<tg::Point2> lex_sorted(std::vector<tg::Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](tg::Point2 a, tg::Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  return pts;
}

tg::HullPolygon random_hull(std::mt19937_64& rng, double center_span = 8.0) {
  std::uniform_real_distribution<double> center(-center_span, center_span);
  std::uniform_real_distribution<double> offset(-2.5, 2.5);
  std::uniform_int_distribution<int> count(4, 10);
  for (;;) {
    const tg::Point2 c{center(rng), center(rng)};
    std::vector<tg::Point2> pts;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) pts.push_back({c.x + offset(rng), c.y + offset(rng)});
    tg::HullPolygon hull = tg::convex_hull(pts);
    if (!hull.degenerate()) return hull;
  }
}

}  // namespace

TEST_CASE("vector helpers behave as expected", "[geometry]") {
  const tg::Vec2 a{3.0, 4.0};
  CHECK(tg::norm(a) == Catch::Approx(5.0));
  CHECK(tg::norm_sq(a) == 25.0);
  CHECK(tg::dot(a, {1.0, 0.0}) == 3.0);
  CHECK(tg::cross({1.0, 0.0}, {0.0, 1.0}) == 1.0);

  const tg::Vec2 r = tg::rotated({1.0, 0.0}, std::numbers::pi / 2.0);
  CHECK(r.x == Catch::Approx(0.0).margin(1e-15));
  CHECK(r.y == Catch::Approx(1.0));

  CHECK(tg::wrap_angle(0.0) == 0.0);
  CHECK(tg::wrap_angle(2.0 * std::numbers::pi) == Catch::Approx(0.0).margin(1e-15));
  CHECK(tg::wrap_angle(3.0 * std::numbers::pi) == Catch::Approx(std::numbers::pi));
  CHECK(tg::wrap_angle(-std::numbers::pi) == Catch::Approx(std::numbers::pi));
  CHECK(tg::wrap_angle(std::numbers::pi) == Catch::Approx(std::numbers::pi));
}

TEST_CASE("orientation classifies canonical triples", "[geometry]") {
  CHECK(tg::orient({0, 0}, {1, 1}, {2, 2}) == tg::Orientation::kCollinear);
  CHECK(tg::orient({0, 0}, {1, 0}, {1, 1}) == tg::Orientation::kCounterClockwise);
  CHECK(tg::cross3({0, 0}, {1, 0}, {1, 1}) == 1.0);
  CHECK(tg::orient({0, 0}, {1, 0}, {1, -1}) == tg::Orientation::kClockwise);
}

TEST_CASE("orientation matches the exact sign oracle on random triples", "[geometry]") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  int band = 0;
  for (int i = 0; i < 20000; ++i) {
    const tg::Point2 p{coord(rng), coord(rng)};
    const tg::Point2 q{coord(rng), coord(rng)};
    const tg::Point2 r{coord(rng), coord(rng)};
    if (std::abs(tg::cross3(p, q, r)) <= tg::kGeomEps) {
      ++band;
      continue;
    }
    const int sign = oracle::orient_sign_exact(p, q, r);
    const tg::Orientation got = tg::orient(p, q, r);
    if (sign > 0) {
      REQUIRE(got == tg::Orientation::kCounterClockwise);
    } else if (sign < 0) {
      REQUIRE(got == tg::Orientation::kClockwise);
    } else {
      REQUIRE(got == tg::Orientation::kCollinear);
    }
  }
  CHECK(band < 20);
}

TEST_CASE("segment intersection handles the canonical cases", "[geometry]") {
  const tg::Segment diag1{{0, 0}, {2, 2}};
  const tg::Segment diag2{{0, 2}, {2, 0}};
  CHECK(tg::segments_intersect(diag1, diag2));

  const tg::Segment low{{0, 0}, {1, 0}};
  const tg::Segment high{{0, 1}, {1, 1}};
  CHECK_FALSE(tg::segments_intersect(low, high));

  const tg::Segment base{{0, 0}, {2, 0}};
  const tg::Segment tee{{1, 0}, {1, 2}};
  CHECK_FALSE(tg::segments_intersect(base, tee));
  CHECK(tg::segments_touch(base, tee));

  const tg::Segment left{{0, 0}, {1, 1}};
  const tg::Segment right{{1, 1}, {2, 0}};
  CHECK_FALSE(tg::segments_intersect(left, right));
  CHECK(tg::segments_touch(left, right));

  const tg::Segment overlap_a{{0, 0}, {2, 0}};
  const tg::Segment overlap_b{{1, 0}, {3, 0}};
  CHECK_FALSE(tg::segments_intersect(overlap_a, overlap_b));
  CHECK(tg::segments_touch(overlap_a, overlap_b));

  const tg::Segment point{{1, 1}, {1, 1}};
  CHECK_FALSE(tg::segments_intersect(point, diag1));
  CHECK_FALSE(tg::segments_touch(low, high));
}

TEST_CASE("segment intersection is symmetric and endpoint-order independent", "[geometry]") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const tg::Segment s1{{coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
    const tg::Segment s2{{coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
    const bool base = tg::segments_intersect(s1, s2);
    CHECK(tg::segments_intersect(s2, s1) == base);
    CHECK(tg::segments_intersect({s1.b, s1.a}, s2) == base);
    CHECK(tg::segments_intersect(s1, {s2.b, s2.a}) == base);
    CHECK(tg::segments_touch(s1, s2) == tg::segments_touch(s2, s1));
    if (base) CHECK(tg::segments_touch(s1, s2));
  }
}

TEST_CASE("segment intersection matches the exact parametric oracle", "[geometry]") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_int_distribution<int> snap(0, 3);
  for (int i = 0; i < 10000; ++i) {
    const auto draw = [&] {
      double v = coord(rng);
      if (snap(rng) == 0) v = std::round(v * 2.0) / 2.0;
      return v;
    };
    const tg::Segment s1{{draw(), draw()}, {draw(), draw()}};
    const tg::Segment s2{{draw(), draw()}, {draw(), draw()}};
    if (oracle::min_orientation_magnitude(s1, s2) <= tg::kGeomEps) continue;
    REQUIRE(tg::segments_intersect(s1, s2) ==
            oracle::segments_properly_intersect_exact(s1, s2));
  }
}

TEST_CASE("convex hull of a square with interior point keeps only the corners", "[geometry]") {
  const std::vector<tg::Point2> input{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const tg::HullPolygon hull = tg::convex_hull(input);
  REQUIRE(hull.size() == 4);
  CHECK(hull.points[0] == tg::Point2{0, 0});
  CHECK(hull.points[1] == tg::Point2{1, 0});
  CHECK(hull.points[2] == tg::Point2{1, 1});
  CHECK(hull.points[3] == tg::Point2{0, 1});
  CHECK(tg::polygon_area(hull) == Catch::Approx(1.0));
}

TEST_CASE("convex hull degenerates gracefully", "[geometry]") {
  const tg::HullPolygon collinear = tg::convex_hull(
      std::vector<tg::Point2>{{0, 0}, {1, 1}, {2, 2}});
  REQUIRE(collinear.size() == 2);
  CHECK(collinear.points[0] == tg::Point2{0, 0});
  CHECK(collinear.points[1] == tg::Point2{2, 2});
  CHECK(collinear.degenerate());
  CHECK(tg::polygon_area(collinear) == 0.0);

  const tg::HullPolygon single = tg::convex_hull(std::vector<tg::Point2>{{3, 4}, {3, 4}});
  REQUIRE(single.size() == 1);
  CHECK(single.points[0] == tg::Point2{3, 4});

  CHECK_THROWS_AS(tg::convex_hull(std::vector<tg::Point2>{}), std::invalid_argument);
}

TEST_CASE("convex hull is idempotent and contains its input", "[geometry]") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<tg::Point2> pts;
    for (int i = 0; i < 200; ++i) pts.push_back({coord(rng), coord(rng)});
    const tg::HullPolygon hull = tg::convex_hull(pts);
    REQUIRE(hull.size() >= 3);
    for (const tg::Point2& p : pts) REQUIRE(tg::point_in_convex(p, hull));
    const tg::HullPolygon again = tg::convex_hull(hull.points);
    REQUIRE(again.points.size() == hull.points.size());
    for (std::size_t i = 0; i < hull.points.size(); ++i) {
      REQUIRE(again.points[i] == hull.points[i]);
    }
    for (std::size_t i = 0; i < hull.points.size(); ++i) {
      const tg::Point2 a = hull.points[i];
      const tg::Point2 b = hull.points[(i + 1) % hull.points.size()];
      const tg::Point2 c = hull.points[(i + 2) % hull.points.size()];
      REQUIRE(tg::orient(a, b, c) == tg::Orientation::kCounterClockwise);
    }
  }
}

TEST_CASE("convex hull matches the brute-force oracle on small sets", "[geometry]") {
  std::mt19937_64 rng(123456);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_int_distribution<int> count(1, 12);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<tg::Point2> pts;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) pts.push_back({coord(rng), coord(rng)});
    const auto expected = oracle::hull_vertices_bruteforce(pts);
    const auto got = lex_sorted(tg::convex_hull(pts).points);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(got[i] == expected[i]);
  }
}

TEST_CASE("point containment is boundary inclusive", "[geometry]") {
  const tg::HullPolygon sq = square(0.0, 0.0, 1.0);
  CHECK(tg::point_in_convex({0.5, 0.5}, sq));
  CHECK(tg::point_in_convex({0.5, 0.0}, sq));
  CHECK(tg::point_in_convex({1.0, 1.0}, sq));
  CHECK_FALSE(tg::point_in_convex({2.0, 2.0}, sq));
  CHECK_FALSE(tg::point_in_convex({0.5, -0.1}, sq));

  const tg::HullPolygon seg{{tg::Point2{0, 0}, tg::Point2{2, 0}}};
  CHECK(tg::point_in_convex({1.0, 0.0}, seg));
  CHECK(tg::point_in_convex({2.0, 0.0}, seg));
  CHECK_FALSE(tg::point_in_convex({3.0, 0.0}, seg));
  CHECK_FALSE(tg::point_in_convex({1.0, 0.1}, seg));

  const tg::HullPolygon dot{{tg::Point2{1, 1}}};
  CHECK(tg::point_in_convex({1.0, 1.0}, dot));
  CHECK_FALSE(tg::point_in_convex({1.0, 1.1}, dot));
}

TEST_CASE("point containment agrees with the exact oracle", "[geometry]") {
  std::mt19937_64 rng(314159);
  std::uniform_real_distribution<double> coord(-12.0, 12.0);
  for (int trial = 0; trial < 200; ++trial) {
    const tg::HullPolygon hull = random_hull(rng);
    for (int i = 0; i < 20; ++i) {
      const tg::Point2 p{coord(rng), coord(rng)};
      REQUIRE(tg::point_in_convex(p, hull) ==
              oracle::point_in_convex_exact(p, hull.points));
    }
  }
}

TEST_CASE("hull relation classifies canonical pairs", "[geometry]") {
  const tg::HullPolygon base = square(0.0, 0.0, 1.0);

  const tg::HullPolygon shifted = square(0.5, 0.5, 1.0);
  CHECK(tg::hulls_relate(base, shifted) == tg::HullRelation::kEdgeIntersect);

  const tg::HullPolygon inner = square(0.25, 0.25, 0.5);
  CHECK(tg::hulls_relate(base, inner) == tg::HullRelation::kH1ContainsH2);
  CHECK(tg::hulls_relate(inner, base) == tg::HullRelation::kH2ContainsH1);

  const tg::HullPolygon far = square(5.0, 5.0, 1.0);
  CHECK(tg::hulls_relate(base, far) == tg::HullRelation::kDisjoint);
  CHECK(tg::collinear_contact_count(base, far) == 0);
}

TEST_CASE("touching hulls report collinear contact instead of crossing", "[geometry]") {
  const tg::HullPolygon left = square(0.0, 0.0, 1.0);
  const tg::HullPolygon right = square(1.0, 0.0, 1.0);
  const tg::HullRelation rel = tg::hulls_relate(left, right);
  CHECK(rel != tg::HullRelation::kEdgeIntersect);
  CHECK(tg::collinear_contact_count(left, right) > 0);

  const tg::HullPolygon corner = square(1.0, 1.0, 1.0);
  CHECK(tg::hulls_relate(left, corner) != tg::HullRelation::kEdgeIntersect);
  CHECK(tg::collinear_contact_count(left, corner) > 0);
}

TEST_CASE("hull relation swaps consistently", "[geometry]") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 1000; ++trial) {
    const tg::HullPolygon h1 = random_hull(rng);
    const tg::HullPolygon h2 = random_hull(rng);
    const tg::HullRelation fwd = tg::hulls_relate(h1, h2);
    const tg::HullRelation rev = tg::hulls_relate(h2, h1);
    switch (fwd) {
      case tg::HullRelation::kDisjoint:
        REQUIRE(rev == tg::HullRelation::kDisjoint);
        break;
      case tg::HullRelation::kEdgeIntersect:
        REQUIRE(rev == tg::HullRelation::kEdgeIntersect);
        break;
      case tg::HullRelation::kH1ContainsH2:
        REQUIRE(rev == tg::HullRelation::kH2ContainsH1);
        break;
      case tg::HullRelation::kH2ContainsH1:
        REQUIRE(rev == tg::HullRelation::kH1ContainsH2);
        break;
    }
    REQUIRE(tg::collinear_contact_count(h1, h2) == tg::collinear_contact_count(h2, h1));
  }
}

TEST_CASE("hull relation matches the exact classifier away from grazing contact", "[geometry]") {
  std::mt19937_64 rng(987654321);
  std::uniform_real_distribution<double> nudge(-6.0, 6.0);
  std::uniform_real_distribution<double> scale_draw(0.15, 1.6);
  int checked = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    const tg::HullPolygon h1 = random_hull(rng);
    tg::HullPolygon h2;
    if (trial % 3 == 0) {
      // Shrink h1 toward its first vertex so containment cases appear often.
      const double s = scale_draw(rng);
      const tg::Point2 anchor = h1.points[0];
      std::vector<tg::Point2> pts;
      for (const tg::Point2& p : h1.points) pts.push_back(anchor + s * (p - anchor));
      const tg::Vec2 shift{0.2 * nudge(rng), 0.2 * nudge(rng)};
      for (auto& p : pts) p = p + shift;
      h2 = tg::convex_hull(pts);
      if (h2.degenerate()) continue;
    } else {
      h2 = random_hull(rng);
    }
    if (oracle::min_relation_margin(h1.points, h2.points) <= 1e-6) continue;
    ++checked;
    const auto expected = oracle::hulls_relate_exact(h1.points, h2.points);
    const tg::HullRelation got = tg::hulls_relate(h1, h2);
    switch (expected) {
      case oracle::HullRelationExact::kDisjoint:
        REQUIRE(got == tg::HullRelation::kDisjoint);
        break;
      case oracle::HullRelationExact::kEdgeIntersect:
        REQUIRE(got == tg::HullRelation::kEdgeIntersect);
        break;
      case oracle::HullRelationExact::kH1ContainsH2:
        REQUIRE(got == tg::HullRelation::kH1ContainsH2);
        break;
      case oracle::HullRelationExact::kH2ContainsH1:
        REQUIRE(got == tg::HullRelation::kH2ContainsH1);
        break;
    }
  }
  CHECK(checked > 3000);
}

TEST_CASE("hull relation is translation invariant away from boundaries", "[geometry]") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> shift_draw(-20.0, 20.0);
  for (int trial = 0; trial < 300; ++trial) {
    const tg::HullPolygon h1 = random_hull(rng);
    const tg::HullPolygon h2 = random_hull(rng);
    if (oracle::min_relation_margin(h1.points, h2.points) <= 1e-3) continue;
    const tg::Vec2 d{shift_draw(rng), shift_draw(rng)};
    const auto move = [&](const tg::HullPolygon& h) {
      tg::HullPolygon out = h;
      for (auto& p : out.points) p = p + d;
      return out;
    };
    REQUIRE(tg::hulls_relate(move(h1), move(h2)) == tg::hulls_relate(h1, h2));
  }
}

TEST_CASE("bounding boxes cover their hulls", "[geometry]") {
  const tg::HullPolygon sq = square(-1.0, 2.0, 3.0);
  const tg::Aabb box = tg::hull_bbox(sq);
  CHECK(box.min.x == -1.0);
  CHECK(box.min.y == 2.0);
  CHECK(box.max.x == 2.0);
  CHECK(box.max.y == 5.0);
}
