// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "contrail/error.hpp"

namespace contrail {

namespace {

constexpr double kEpsilon = 2.220446049250313e-16;

// Negative when (a, b, c) turns counter-clockwise.
inline double orient(double ax, double ay, double bx, double by, double cx, double cy) {
  return (ay - cy) * (bx - cx) - (ax - cx) * (by - cy);
}

inline bool in_circle(double ax, double ay, double bx, double by, double cx, double cy, double px, double py) {
  const double dx = ax - px, dy = ay - py;
  const double ex = bx - px, ey = by - py;
  const double fx = cx - px, fy = cy - py;
  const double ap = dx * dx + dy * dy;
  const double bp = ex * ex + ey * ey;
  const double cp = fx * fx + fy * fy;
  return dx * (ey * cp - bp * fy) - dy * (ex * cp - bp * fx) + ap * (ex * fy - ey * fx) < 0;
}

inline double circumradius_sq(double ax, double ay, double bx, double by, double cx, double cy) {
  const double dx = bx - ax, dy = by - ay;
  const double ex = cx - ax, ey = cy - ay;
  const double bl = dx * dx + dy * dy;
  const double cl = ex * ex + ey * ey;
  const double den = dx * ey - dy * ex;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  const double d = 0.5 / den;
  const double x = (ey * bl - dy * cl) * d;
  const double y = (dx * cl - ex * bl) * d;
  return x * x + y * y;
}

inline Point2 circumcenter(double ax, double ay, double bx, double by, double cx, double cy) {
  const double dx = bx - ax, dy = by - ay;
  const double ex = cx - ax, ey = cy - ay;
  const double bl = dx * dx + dy * dy;
  const double cl = ex * ex + ey * ey;
  const double d = 0.5 / (dx * ey - dy * ex);
  return {ax + (ey * bl - dy * cl) * d, ay + (dx * cl - ex * bl) * d};
}

inline double sq_dist(double ax, double ay, double bx, double by) {
  const double dx = ax - bx, dy = ay - by;
  return dx * dx + dy * dy;
}

inline double pseudo_angle(double dx, double dy) {
  const double denom = std::abs(dx) + std::abs(dy);
  if (denom == 0.0) return 0.0;
  const double p = dx / denom;
  return (dy > 0 ? 3.0 - p : 1.0 + p) / 4.0;
}

}  // namespace

double circumradius(const Point2& a, const Point2& b, const Point2& c) {
  return std::sqrt(circumradius_sq(a.x, a.y, b.x, b.y, c.x, c.y));
}

std::size_t Delaunay::hash_key(double x, double y) const {
  const double a = pseudo_angle(x - cx_, y - cy_);
  return static_cast<std::size_t>(std::floor(a * static_cast<double>(hash_size_))) % hash_size_;
}

void Delaunay::link(std::int64_t a, std::int64_t b) {
  halfedges[static_cast<std::size_t>(a)] = b;
  if (b != -1) halfedges[static_cast<std::size_t>(b)] = a;
}

std::int64_t Delaunay::add_triangle(std::int64_t i0, std::int64_t i1, std::int64_t i2, std::int64_t a,
                                    std::int64_t b, std::int64_t c) {
  const auto t = static_cast<std::int64_t>(triangles.size());
  triangles.push_back(i0);
  triangles.push_back(i1);
  triangles.push_back(i2);
  halfedges.push_back(-1);
  halfedges.push_back(-1);
  halfedges.push_back(-1);
  link(t, a);
  link(t + 1, b);
  link(t + 2, c);
  return t;
}

std::int64_t Delaunay::legalize(std::int64_t a) {
  const auto& X = pts_.x;
  const auto& Y = pts_.y;
  std::size_t depth = 0;
  std::int64_t ar = 0;
  while (true) {
    const std::int64_t b = halfedges[static_cast<std::size_t>(a)];
    const std::int64_t a0 = a - a % 3;
    ar = a0 + (a + 2) % 3;

    if (b == -1) {
      if (depth == 0) break;
      a = edge_stack_[--depth];
      continue;
    }

    const std::int64_t b0 = b - b % 3;
    const std::int64_t al = a0 + (a + 1) % 3;
    const std::int64_t bl = b0 + (b + 2) % 3;

    const auto p0 = static_cast<std::size_t>(triangles[static_cast<std::size_t>(ar)]);
    const auto pr = static_cast<std::size_t>(triangles[static_cast<std::size_t>(a)]);
    const auto pl = static_cast<std::size_t>(triangles[static_cast<std::size_t>(al)]);
    const auto p1 = static_cast<std::size_t>(triangles[static_cast<std::size_t>(bl)]);

    if (in_circle(X[p0], Y[p0], X[pr], Y[pr], X[pl], Y[pl], X[p1], Y[p1])) {
      triangles[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(p1);
      triangles[static_cast<std::size_t>(b)] = static_cast<std::int64_t>(p0);

      const std::int64_t hbl = halfedges[static_cast<std::size_t>(bl)];
      if (hbl == -1) {
        // edge swapped on the other side of the hull; fix the hull reference
        std::int64_t e = hull_start_;
        do {
          if (hull_tri_[static_cast<std::size_t>(e)] == bl) {
            hull_tri_[static_cast<std::size_t>(e)] = a;
            break;
          }
          e = hull_prev_[static_cast<std::size_t>(e)];
        } while (e != hull_start_);
      }
      link(a, hbl);
      link(b, halfedges[static_cast<std::size_t>(ar)]);
      link(ar, bl);

      const std::int64_t br = b0 + (b + 1) % 3;
      if (depth >= edge_stack_.size()) edge_stack_.resize(edge_stack_.size() * 2 + 16);
      edge_stack_[depth++] = br;
    } else {
      if (depth == 0) break;
      a = edge_stack_[--depth];
    }
  }
  return ar;
}

Delaunay::Delaunay(const PointSet& pts) : pts_(pts) {
  const std::size_t n = pts.size();
  if (n < 3) throw Error(ErrorKind::DegenerateInput, "need at least 3 points, got " + std::to_string(n));
  const auto& X = pts.x;
  const auto& Y = pts.y;

  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (std::size_t i = 0; i < n; ++i) {
    min_x = std::min(min_x, X[i]);
    min_y = std::min(min_y, Y[i]);
    max_x = std::max(max_x, X[i]);
    max_y = std::max(max_y, Y[i]);
  }
  const double bx = (min_x + max_x) / 2, by = (min_y + max_y) / 2;

  std::size_t i0 = 0, i1 = n, i2 = n;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sq_dist(bx, by, X[i], Y[i]);
    if (d < best) {
      i0 = i;
      best = d;
    }
  }
  best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == i0) continue;
    const double d = sq_dist(X[i0], Y[i0], X[i], Y[i]);
    if (d < best && d > 0) {
      i1 = i;
      best = d;
    }
  }
  if (i1 == n) throw Error(ErrorKind::DegenerateInput, "all points coincide");
  double min_radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == i0 || i == i1) continue;
    const double r = circumradius_sq(X[i0], Y[i0], X[i1], Y[i1], X[i], Y[i]);
    if (r < min_radius) {
      i2 = i;
      min_radius = r;
    }
  }
  if (!std::isfinite(min_radius)) throw Error(ErrorKind::DegenerateInput, "all points are collinear");

  if (orient(X[i0], Y[i0], X[i1], Y[i1], X[i2], Y[i2]) < 0) std::swap(i1, i2);

  const Point2 center = circumcenter(X[i0], Y[i0], X[i1], Y[i1], X[i2], Y[i2]);
  cx_ = center.x;
  cy_ = center.y;

  std::vector<double> dists(n);
  for (std::size_t i = 0; i < n; ++i) dists[i] = sq_dist(X[i], Y[i], cx_, cy_);
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return dists[a] < dists[b] || (dists[a] == dists[b] && a < b);
  });

  hash_size_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  hull_prev_.assign(n, 0);
  hull_next_.assign(n, 0);
  hull_tri_.assign(n, 0);
  hull_hash_.assign(hash_size_, -1);
  edge_stack_.resize(512);

  const auto s0 = static_cast<std::int64_t>(i0), s1 = static_cast<std::int64_t>(i1),
             s2 = static_cast<std::int64_t>(i2);
  hull_start_ = s0;
  hull_next_[i0] = hull_prev_[i2] = s1;
  hull_next_[i1] = hull_prev_[i0] = s2;
  hull_next_[i2] = hull_prev_[i1] = s0;
  hull_tri_[i0] = 0;
  hull_tri_[i1] = 1;
  hull_tri_[i2] = 2;
  hull_hash_[hash_key(X[i0], Y[i0])] = s0;
  hull_hash_[hash_key(X[i1], Y[i1])] = s1;
  hull_hash_[hash_key(X[i2], Y[i2])] = s2;

  const std::size_t max_triangles = 2 * n - 5;
  triangles.reserve(max_triangles * 3);
  halfedges.reserve(max_triangles * 3);
  add_triangle(s0, s1, s2, -1, -1, -1);

  double xp = 0.0, yp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = ids[k];
    const double x = X[i], y = Y[i];

    if (k > 0 && std::abs(x - xp) <= kEpsilon && std::abs(y - yp) <= kEpsilon) continue;
    xp = x;
    yp = y;
    if (i == i0 || i == i1 || i == i2) continue;

    std::int64_t start = 0;
    for (std::size_t j = 0, key = hash_key(x, y); j < hash_size_; ++j) {
      start = hull_hash_[(key + j) % hash_size_];
      if (start != -1 && start != hull_next_[static_cast<std::size_t>(start)]) break;
    }

    start = hull_prev_[static_cast<std::size_t>(start)];
    std::int64_t e = start;
    std::int64_t q = 0;
    while (true) {
      q = hull_next_[static_cast<std::size_t>(e)];
      if (!(orient(x, y, X[static_cast<std::size_t>(e)], Y[static_cast<std::size_t>(e)],
                   X[static_cast<std::size_t>(q)], Y[static_cast<std::size_t>(q)]) >= 0))
        break;
      e = q;
      if (e == start) {
        e = -1;
        break;
      }
    }
    if (e == -1) continue;  // near-duplicate

    const auto si = static_cast<std::int64_t>(i);
    std::int64_t t = add_triangle(e, si, hull_next_[static_cast<std::size_t>(e)], -1, -1,
                                  hull_tri_[static_cast<std::size_t>(e)]);
    hull_tri_[i] = legalize(t + 2);
    hull_tri_[static_cast<std::size_t>(e)] = t;

    std::int64_t nx = hull_next_[static_cast<std::size_t>(e)];
    while (true) {
      q = hull_next_[static_cast<std::size_t>(nx)];
      if (!(orient(x, y, X[static_cast<std::size_t>(nx)], Y[static_cast<std::size_t>(nx)],
                   X[static_cast<std::size_t>(q)], Y[static_cast<std::size_t>(q)]) < 0))
        break;
      t = add_triangle(nx, si, q, hull_tri_[i], -1, hull_tri_[static_cast<std::size_t>(nx)]);
      hull_tri_[i] = legalize(t + 2);
      hull_next_[static_cast<std::size_t>(nx)] = nx;  // removed from hull
      nx = q;
    }

    if (e == start) {
      while (true) {
        q = hull_prev_[static_cast<std::size_t>(e)];
        if (!(orient(x, y, X[static_cast<std::size_t>(q)], Y[static_cast<std::size_t>(q)],
                     X[static_cast<std::size_t>(e)], Y[static_cast<std::size_t>(e)]) < 0))
          break;
        t = add_triangle(q, si, e, -1, hull_tri_[static_cast<std::size_t>(e)],
                         hull_tri_[static_cast<std::size_t>(q)]);
        legalize(t + 2);
        hull_tri_[static_cast<std::size_t>(q)] = t;
        hull_next_[static_cast<std::size_t>(e)] = e;  // removed from hull
        e = q;
      }
    }

    hull_start_ = hull_prev_[i] = e;
    hull_next_[static_cast<std::size_t>(e)] = hull_prev_[static_cast<std::size_t>(nx)] = si;
    hull_next_[i] = nx;

    hull_hash_[hash_key(x, y)] = si;
    hull_hash_[hash_key(X[static_cast<std::size_t>(e)], Y[static_cast<std::size_t>(e)])] = e;
  }

  // scratch state is only needed during construction
  hull_prev_.clear();
  hull_next_.clear();
  hull_tri_.clear();
  hull_hash_.clear();
  edge_stack_.clear();
}

}  // namespace contrail
