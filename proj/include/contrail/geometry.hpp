// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "contrail/simd/kernels.hpp"

namespace contrail {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Columnar 2D or 3D point set; `z` stays empty for planar data.
struct PointSet {
  int dim = 2;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;

  std::size_t size() const noexcept { return x.size(); }
  bool empty() const noexcept { return x.empty(); }

  void push(double px, double py) {
    x.push_back(px);
    y.push_back(py);
  }
  void push(double px, double py, double pz) {
    x.push_back(px);
    y.push_back(py);
    z.push_back(pz);
  }
  void reserve(std::size_t n) {
    x.reserve(n);
    y.reserve(n);
    if (dim == 3) z.reserve(n);
  }

  double sq_distance(std::size_t i, std::size_t j) const noexcept {
    const double dx = x[i] - x[j];
    const double dy = y[i] - y[j];
    double d = dx * dx + dy * dy;
    if (dim == 3) {
      const double dz = z[i] - z[j];
      d = d + dz * dz;
    }
    return d;
  }

  simd::CoordsView view() const noexcept {
    return {x.data(), y.data(), dim == 3 ? z.data() : nullptr, x.size()};
  }
  simd::CoordsView view(std::size_t first, std::size_t count) const noexcept {
    return {x.data() + first, y.data() + first, dim == 3 ? z.data() + first : nullptr, count};
  }

  static PointSet from_points(std::span<const Point2> pts);
  std::vector<Point2> to_points2() const;
  PointSet subset(std::span<const std::size_t> indices) const;
};

/// Signed double area of triangle (a, b, c); positive when counter-clockwise.
inline double orient2d(const Point2& a, const Point2& b, const Point2& c) noexcept {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Convex hull by Andrew's monotone chain, counter-clockwise, collinear
/// points dropped. Returns indices into `pts`.
std::vector<std::size_t> convex_hull_2d(const PointSet& pts);

/// Point-set diameter by exhaustive pairs (reference path).
double diameter_all_pairs(const PointSet& pts);

/// Point-set diameter restricted to the extreme candidates: convex-hull
/// vertices in 2D; in 3D the points that can still reach the lower bound
/// obtained from axis-extreme pairs. Same value as diameter_all_pairs.
double diameter_hull(const PointSet& pts);

/// Signed shoelace area of a closed polygon (positive when counter-clockwise).
double signed_area(std::span<const Point2> polygon);

/// True when no two non-adjacent edges of the closed polygon touch.
bool is_simple_polygon(std::span<const Point2> polygon);

/// Inside-or-on test (even-odd rule, boundary counted as inside within tol).
bool point_in_polygon(std::span<const Point2> polygon, Point2 p, double tol = 0.0);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit least_squares(std::span<const double> xs, std::span<const double> ys);

}  // namespace contrail
