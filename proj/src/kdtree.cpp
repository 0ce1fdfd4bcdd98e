// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace contrail {

KdTree::KdTree(const PointSet& pts, std::size_t leaf_size) : pts_(pts), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  index_.resize(pts.size());
  std::iota(index_.begin(), index_.end(), 0u);
  if (!pts.empty()) {
    nodes_.reserve(2 * pts.size() / leaf_size_ + 2);
    build(0, static_cast<std::uint32_t>(pts.size()));
  }
}

double KdTree::coord(std::size_t i, int axis) const noexcept {
  switch (axis) {
    case 0: return pts_.x[i];
    case 1: return pts_.y[i];
    default: return pts_.z[i];
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  const int dims = pts_.dim;
  Node node{begin, end};
  for (int a = 0; a < dims; ++a) {
    node.lo[a] = std::numeric_limits<double>::infinity();
    node.hi[a] = -std::numeric_limits<double>::infinity();
  }
  for (std::uint32_t k = begin; k < end; ++k) {
    for (int a = 0; a < dims; ++a) {
      const double c = coord(index_[k], a);
      node.lo[a] = std::min(node.lo[a], c);
      node.hi[a] = std::max(node.hi[a], c);
    }
  }
  if (end - begin > leaf_size_) {
    int axis = 0;
    for (int a = 1; a < dims; ++a)
      if (node.hi[a] - node.lo[a] > node.hi[axis] - node.lo[axis]) axis = a;
    if (node.hi[axis] > node.lo[axis]) {
      const std::uint32_t mid = begin + (end - begin) / 2;
      std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                       [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = coord(a, axis), cb = coord(b, axis);
                         return ca < cb || (ca == cb && a < b);
                       });
      node.axis = static_cast<std::uint8_t>(axis);
      node.split = coord(index_[mid], axis);
      node.left = build(begin, mid);
      node.right = build(mid, end);
    }
  }
  nodes_[static_cast<std::size_t>(id)] = node;
  return id;
}

double KdTree::box_sq_distance(const Node& node, const double* q) const noexcept {
  double d = 0.0;
  for (int a = 0; a < pts_.dim; ++a) {
    double diff = 0.0;
    if (q[a] < node.lo[a])
      diff = node.lo[a] - q[a];
    else if (q[a] > node.hi[a])
      diff = q[a] - node.hi[a];
    d += diff * diff;
  }
  return d;
}

std::vector<KdTree::Neighbor> KdTree::knn_of(std::size_t i, std::size_t k) const {
  std::vector<Neighbor> best;
  if (nodes_.empty() || k == 0) return best;
  best.reserve(k + 1);
  const double q[3] = {pts_.x[i], pts_.y[i], pts_.dim == 3 ? pts_.z[i] : 0.0};
  auto worse = [](const Neighbor& a, const Neighbor& b) {
    return a.sq_distance < b.sq_distance || (a.sq_distance == b.sq_distance && a.index < b.index);
  };
  auto bound = [&]() {
    return best.size() < k ? std::numeric_limits<double>::infinity() : best.back().sq_distance;
  };

  // explicit stack of (node, box distance)
  std::vector<std::pair<std::int32_t, double>> stack;
  stack.emplace_back(0, box_sq_distance(nodes_[0], q));
  while (!stack.empty()) {
    const auto [id, box_d] = stack.back();
    stack.pop_back();
    if (box_d > bound()) continue;
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.left < 0) {
      for (std::uint32_t s = node.begin; s < node.end; ++s) {
        const std::size_t j = index_[s];
        if (j == i) continue;
        const Neighbor cand{j, pts_.sq_distance(i, j)};
        if (best.size() < k || worse(cand, best.back())) {
          best.insert(std::upper_bound(best.begin(), best.end(), cand, worse), cand);
          if (best.size() > k) best.pop_back();
        }
      }
      continue;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    const double dl = box_sq_distance(l, q);
    const double dr = box_sq_distance(r, q);
    // push the farther child first so the nearer one is visited next
    if (dl <= dr) {
      stack.emplace_back(node.right, dr);
      stack.emplace_back(node.left, dl);
    } else {
      stack.emplace_back(node.left, dl);
      stack.emplace_back(node.right, dr);
    }
  }
  return best;
}

double KdTree::kth_distance(std::size_t i, std::size_t k) const {
  const auto nn = knn_of(i, k);
  if (nn.size() < k) return std::numeric_limits<double>::infinity();
  return std::sqrt(nn.back().sq_distance);
}

void KdTree::radius_of(std::size_t i, double radius, std::vector<std::size_t>& out) const {
  if (nodes_.empty()) return;
  const double r2 = radius * radius;
  const double q[3] = {pts_.x[i], pts_.y[i], pts_.dim == 3 ? pts_.z[i] : 0.0};
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
    if (box_sq_distance(node, q) > r2) continue;
    if (node.left < 0) {
      for (std::uint32_t s = node.begin; s < node.end; ++s) {
        const std::size_t j = index_[s];
        if (pts_.sq_distance(i, j) <= r2) out.push_back(j);
      }
      continue;
    }
    stack[top++] = node.left;
    stack[top++] = node.right;
  }
}

}  // namespace contrail
