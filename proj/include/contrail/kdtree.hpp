// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "contrail/geometry.hpp"

namespace contrail {

/// Static kd-tree over a 2D or 3D PointSet for exact k-nearest-neighbor and
/// fixed-radius queries. The tree keeps a reference to the points; the set
/// must outlive it.
class KdTree {
 public:
  explicit KdTree(const PointSet& pts, std::size_t leaf_size = 12);

  struct Neighbor {
    std::size_t index;
    double sq_distance;
  };

  /// The k nearest points to point `i`, excluding `i` itself, ascending by
  /// (distance, index).
  std::vector<Neighbor> knn_of(std::size_t i, std::size_t k) const;

  /// Distance from point `i` to its k-th nearest other point.
  double kth_distance(std::size_t i, std::size_t k) const;

  /// Appends the indices of all points within `radius` (inclusive) of point
  /// `i`, including `i` itself. Order is unspecified.
  void radius_of(std::size_t i, double radius, std::vector<std::size_t>& out) const;

  std::size_t size() const noexcept { return pts_.size(); }

 private:
  struct Node {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t axis = 0;
    double split = 0.0;
    double lo[3]{};
    double hi[3]{};
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double coord(std::size_t i, int axis) const noexcept;
  double box_sq_distance(const Node& node, const double* q) const noexcept;

  const PointSet& pts_;
  std::size_t leaf_size_;
  std::vector<std::uint32_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace contrail
