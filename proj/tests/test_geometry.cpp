// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "contrail/delaunay.hpp"
#include "contrail/error.hpp"
#include "contrail/geometry.hpp"
#include "contrail/kdtree.hpp"
#include "doctest.h"
#include "oracles/oracles.hpp"

using namespace contrail;

namespace {

PointSet random_points(std::size_t n, int dim, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  PointSet p;
  p.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    if (dim == 3)
      p.push(u(rng), u(rng), u(rng));
    else
      p.push(u(rng), u(rng));
  }
  return p;
}

std::vector<oracle::P3> as_p3(const PointSet& p) {
  std::vector<oracle::P3> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back({p.x[i], p.y[i], p.dim == 3 ? p.z[i] : 0.0});
  return out;
}

}  // namespace

TEST_CASE("convex hull of a square with interior and edge points") {
  PointSet p;
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}})
    p.push(x, y);
  auto h = convex_hull_2d(p);
  std::set<std::size_t> hs(h.begin(), h.end());
  CHECK(hs == std::set<std::size_t>{0, 1, 2, 3});
  std::vector<Point2> poly;
  for (auto i : h) poly.push_back({p.x[i], p.y[i]});
  CHECK(signed_area(poly) == doctest::Approx(1.0));
}

TEST_CASE("convex hull matches the extreme-edge oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PointSet p = random_points(60, 2, seed);
    std::vector<oracle::P2> q;
    for (std::size_t i = 0; i < p.size(); ++i) q.push_back({p.x[i], p.y[i]});
    auto h = convex_hull_2d(p);
    CHECK(std::set<std::size_t>(h.begin(), h.end()) == oracle::hull_vertices(q));
  }
}

TEST_CASE("diameter small fixtures") {
  PointSet p;
  p.push(0, 0);
  p.push(3, 4);
  p.push(1, 1);
  CHECK(diameter_all_pairs(p) == 5.0);
  CHECK(diameter_hull(p) == 5.0);
  PointSet one;
  one.push(2, 2);
  CHECK(diameter_hull(one) == 0.0);
  CHECK(diameter_all_pairs(one) == 0.0);
}

TEST_CASE("hull-path diameter equals all-pairs exactly") {
  for (int dim : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const PointSet p = random_points(1500, dim, seed * 7 + dim);
      CAPTURE(dim);
      CHECK(diameter_hull(p) == diameter_all_pairs(p));
      CHECK(diameter_all_pairs(p) == oracle::diameter(as_p3(p)));
    }
  }
}

TEST_CASE("diameter on clustered and degenerate 3D sets") {
  PointSet line;
  line.dim = 3;
  for (int i = 0; i < 50; ++i) line.push(i * 0.1, 0, 0);
  CHECK(diameter_hull(line) == diameter_all_pairs(line));
  PointSet ball = random_points(4000, 3, 99, 1e-4);
  CHECK(diameter_hull(ball) == diameter_all_pairs(ball));
}

TEST_CASE("diameter invariant under rigid motion") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
  for (int rep = 0; rep < 10; ++rep) {
    const PointSet p = random_points(800, 2, 300 + rep);
    const double a = u(rng), c = std::cos(a), s = std::sin(a);
    PointSet q;
    for (std::size_t i = 0; i < p.size(); ++i) q.push(c * p.x[i] - s * p.y[i] + 17.0, s * p.x[i] + c * p.y[i] - 3.0);
    const double d0 = diameter_hull(p), d1 = diameter_hull(q);
    CHECK(std::abs(d0 - d1) <= 1e-9 * d0);
  }
}

TEST_CASE("polygon predicates") {
  std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(is_simple_polygon(sq));
  CHECK(point_in_polygon(sq, {0.5, 0.5}));
  CHECK(point_in_polygon(sq, {1.0, 0.5}, 1e-12));
  CHECK_FALSE(point_in_polygon(sq, {1.5, 0.5}));
  std::vector<Point2> bow{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_FALSE(is_simple_polygon(bow));
  std::vector<Point2> tri{{0, 0}, {1, 0}, {0, 1}};
  CHECK(signed_area(tri) == 0.5);
}

TEST_CASE("least squares recovers an exact line") {
  std::vector<double> xs{0, 1, 2, 3, 4}, ys;
  for (double x : xs) ys.push_back(0.1 * x + 2.0);
  const LineFit f = least_squares(xs, ys);
  CHECK(f.slope == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("delaunay satisfies the empty-circumcircle property") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PointSet p = random_points(300, 2, 40 + seed);
    const Delaunay d(p);
    const auto hull = convex_hull_2d(p);
    CHECK(d.triangle_count() == 2 * p.size() - hull.size() - 2);
    for (std::size_t t = 0; t < d.triangle_count(); ++t) {
      const auto a = d.triangles[3 * t], b = d.triangles[3 * t + 1], c = d.triangles[3 * t + 2];
      const double ax = p.x[a], ay = p.y[a], bx = p.x[b], by = p.y[b], cx = p.x[c], cy = p.y[c];
      const double dd = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
      const double ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / dd;
      const double uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / dd;
      const double r2 = (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy);
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double d2 = (p.x[k] - ux) * (p.x[k] - ux) + (p.y[k] - uy) * (p.y[k] - uy);
        CHECK(d2 >= r2 * (1 - 1e-9));
      }
    }
    for (std::size_t e = 0; e < d.halfedges.size(); ++e)
      if (d.halfedges[e] >= 0) CHECK(d.halfedges[static_cast<std::size_t>(d.halfedges[e])] == static_cast<std::int64_t>(e));
  }
}

TEST_CASE("delaunay rejects degenerate input") {
  PointSet two;
  two.push(0, 0);
  two.push(1, 1);
  CHECK_THROWS_AS(Delaunay{two}, Error);
  PointSet line;
  for (int i = 0; i < 10; ++i) line.push(i, 2 * i);
  try {
    Delaunay d(line);
    FAIL("expected DegenerateInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateInput);
  }
}

TEST_CASE("circumradius") {
  CHECK(circumradius({0, 0}, {2, 0}, {0, 2}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::isinf(circumradius({0, 0}, {1, 1}, {2, 2})));
}

TEST_CASE("kd-tree queries match brute force") {
  for (int dim : {2, 3}) {
    const PointSet p = random_points(700, dim, 11 + dim);
    const KdTree tree(p);
    const auto q = as_p3(p);
    for (std::size_t i = 0; i < p.size(); i += 37) {
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t j = 0; j < p.size(); ++j)
        if (j != i) all.push_back({oracle::sq_dist(q[i], q[j]), j});
      std::sort(all.begin(), all.end());
      const auto knn = tree.knn_of(i, 5);
      REQUIRE(knn.size() == 5);
      for (int k = 0; k < 5; ++k) {
        CHECK(knn[k].index == all[k].second);
        CHECK(knn[k].sq_distance == all[k].first);
      }
      CHECK(tree.kth_distance(i, 3) == std::sqrt(all[2].first));

      const double r = 0.15;
      std::vector<std::size_t> got;
      tree.radius_of(i, r, got);
      std::sort(got.begin(), got.end());
      std::vector<std::size_t> want{i};
      for (auto& [d2, j] : all)
        if (d2 <= r * r) want.push_back(j);
      std::sort(want.begin(), want.end());
      CHECK(got == want);
    }
  }
}
