// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace contrail {

PointSet PointSet::from_points(std::span<const Point2> pts) {
  PointSet out;
  out.dim = 2;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push(p.x, p.y);
  return out;
}

std::vector<Point2> PointSet::to_points2() const {
  std::vector<Point2> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = {x[i], y[i]};
  return out;
}

PointSet PointSet::subset(std::span<const std::size_t> indices) const {
  PointSet out;
  out.dim = dim;
  out.reserve(indices.size());
  for (const std::size_t i : indices) {
    if (dim == 3)
      out.push(x[i], y[i], z[i]);
    else
      out.push(x[i], y[i]);
  }
  return out;
}

std::vector<std::size_t> convex_hull_2d(const PointSet& pts) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pts.x[a] < pts.x[b] || (pts.x[a] == pts.x[b] && pts.y[a] < pts.y[b]);
  });
  order.erase(std::unique(order.begin(), order.end(),
                          [&](std::size_t a, std::size_t b) { return pts.x[a] == pts.x[b] && pts.y[a] == pts.y[b]; }),
              order.end());
  if (order.size() < 3) return order;

  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (pts.x[a] - pts.x[o]) * (pts.y[b] - pts.y[o]) - (pts.y[a] - pts.y[o]) * (pts.x[b] - pts.x[o]);
  };
  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  for (const std::size_t i : order) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], i) <= 0) --k;
    hull[k++] = i;
  }
  for (std::size_t t = order.size() - 1, lower = k + 1; t-- > 0;) {
    const std::size_t i = order[t];
    while (k >= lower && cross(hull[k - 2], hull[k - 1], i) <= 0) --k;
    hull[k++] = i;
  }
  hull.resize(k - 1);
  return hull;
}

namespace {

double max_pair_sq(const PointSet& pts) {
  const auto& kern = simd::kernels();
  double best = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double qz = pts.dim == 3 ? pts.z[i] : 0.0;
    best = std::max(best, kern.max_sq_distance(pts.view(i + 1, n - i - 1), pts.x[i], pts.y[i], qz));
  }
  return best;
}

}  // namespace

double diameter_all_pairs(const PointSet& pts) { return std::sqrt(max_pair_sq(pts)); }

double diameter_hull(const PointSet& pts) {
  const std::size_t n = pts.size();
  if (n < 2) return 0.0;
  if (pts.dim == 2) {
    const auto hull = convex_hull_2d(pts);
    return std::sqrt(max_pair_sq(pts.subset(hull)));
  }

  // 3D: any diameter pair (p, q) satisfies |p - c| >= D - |q - c| >= D0 - R
  // for every lower bound D0 <= D and R = max |x - c|.
  std::array<std::size_t, 6> extreme{};
  extreme.fill(0);
  for (std::size_t i = 1; i < n; ++i) {
    if (pts.x[i] < pts.x[extreme[0]]) extreme[0] = i;
    if (pts.x[i] > pts.x[extreme[1]]) extreme[1] = i;
    if (pts.y[i] < pts.y[extreme[2]]) extreme[2] = i;
    if (pts.y[i] > pts.y[extreme[3]]) extreme[3] = i;
    if (pts.z[i] < pts.z[extreme[4]]) extreme[4] = i;
    if (pts.z[i] > pts.z[extreme[5]]) extreme[5] = i;
  }
  double lower_sq = 0.0;
  for (std::size_t a = 0; a < extreme.size(); ++a)
    for (std::size_t b = a + 1; b < extreme.size(); ++b)
      lower_sq = std::max(lower_sq, pts.sq_distance(extreme[a], extreme[b]));

  double cx = 0.0, cy = 0.0, cz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cx += pts.x[i];
    cy += pts.y[i];
    cz += pts.z[i];
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  cz /= static_cast<double>(n);
  std::vector<double> radius(n);
  double r_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = pts.x[i] - cx, dy = pts.y[i] - cy, dz = pts.z[i] - cz;
    radius[i] = std::sqrt(dx * dx + dy * dy + dz * dz);
    r_max = std::max(r_max, radius[i]);
  }
  const double lower = std::sqrt(lower_sq);
  // slack keeps rounding in the radius evaluation from discarding a true candidate
  const double cut = (lower - r_max) - 1e-9 * (lower + r_max);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (radius[i] >= cut) keep.push_back(i);
  return std::sqrt(max_pair_sq(pts.subset(keep)));
}

double signed_area(std::span<const Point2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

namespace {

int sign(double v) { return (v > 0) - (v < 0); }

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const int o1 = sign(orient2d(a, b, c));
  const int o2 = sign(orient2d(a, b, d));
  const int o3 = sign(orient2d(c, d, a));
  const int o4 = sign(orient2d(c, d, b));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double segment_distance(const Point2& a, const Point2& b, const Point2& p) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = a.x + t * vx - p.x, dy = a.y + t * vy - p.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

bool is_simple_polygon(std::span<const Point2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (polygon[i] == polygon[j]) return false;
    }
  }
  if (n == 3) return std::abs(signed_area(polygon)) > 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (segments_touch(a, b, polygon[j], polygon[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_in_polygon(std::span<const Point2> polygon, Point2 p, double tol) {
  const std::size_t n = polygon.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[j];
    if (segment_distance(a, b, p) <= tol) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

LineFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    sxx += dx * dx;
    sxy += dx * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace contrail
