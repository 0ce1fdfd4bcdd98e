// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "contrail/geometry.hpp"

namespace contrail {

/// 2D Delaunay triangulation (sweep-hull construction with edge flips).
///
/// Triangles are stored as vertex triples in `triangles`; half-edge `e`
/// runs from triangles[e] to triangles[next_halfedge(e)] and `halfedges[e]`
/// is its twin in the adjacent triangle, or -1 on the convex hull. All
/// triangles share one orientation. Near-duplicate input points are left
/// out of the triangulation.
class Delaunay {
 public:
  /// Throws Error(DegenerateInput) for fewer than 3 points or all-collinear input.
  explicit Delaunay(const PointSet& pts);

  std::vector<std::int64_t> triangles;
  std::vector<std::int64_t> halfedges;

  std::size_t triangle_count() const noexcept { return triangles.size() / 3; }
  static std::int64_t next_halfedge(std::int64_t e) noexcept { return (e % 3 == 2) ? e - 2 : e + 1; }

 private:
  std::int64_t legalize(std::int64_t a);
  std::int64_t add_triangle(std::int64_t i0, std::int64_t i1, std::int64_t i2, std::int64_t a, std::int64_t b,
                            std::int64_t c);
  void link(std::int64_t a, std::int64_t b);
  std::size_t hash_key(double x, double y) const;

  const PointSet& pts_;
  std::vector<std::int64_t> hull_prev_;
  std::vector<std::int64_t> hull_next_;
  std::vector<std::int64_t> hull_tri_;
  std::vector<std::int64_t> hull_hash_;
  std::vector<std::int64_t> edge_stack_;
  std::int64_t hull_start_ = 0;
  double cx_ = 0.0;
  double cy_ = 0.0;
  std::size_t hash_size_ = 0;
};

/// Circumradius of triangle (a, b, c); +inf for degenerate triangles.
double circumradius(const Point2& a, const Point2& b, const Point2& c);

}  // namespace contrail
