// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/simd/kernels.hpp"

#include <limits>

namespace contrail::simd::scalar {

double min_sq_distance(CoordsView pts, double qx, double qy, double qz) {
  double best = std::numeric_limits<double>::infinity();
  if (pts.z) {
    for (std::size_t i = 0; i < pts.n; ++i) {
      const double dx = pts.x[i] - qx;
      const double dy = pts.y[i] - qy;
      const double dz = pts.z[i] - qz;
      const double d = (dx * dx + dy * dy) + dz * dz;
      if (d < best) best = d;
    }
  } else {
    for (std::size_t i = 0; i < pts.n; ++i) {
      const double dx = pts.x[i] - qx;
      const double dy = pts.y[i] - qy;
      const double d = dx * dx + dy * dy;
      if (d < best) best = d;
    }
  }
  return best;
}

double max_sq_distance(CoordsView pts, double qx, double qy, double qz) {
  double best = 0.0;
  if (pts.z) {
    for (std::size_t i = 0; i < pts.n; ++i) {
      const double dx = pts.x[i] - qx;
      const double dy = pts.y[i] - qy;
      const double dz = pts.z[i] - qz;
      const double d = (dx * dx + dy * dy) + dz * dz;
      if (d > best) best = d;
    }
  } else {
    for (std::size_t i = 0; i < pts.n; ++i) {
      const double dx = pts.x[i] - qx;
      const double dy = pts.y[i] - qy;
      const double d = dx * dx + dy * dy;
      if (d > best) best = d;
    }
  }
  return best;
}

double sum_cubes(const double* d, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += d[i] * d[i] * d[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace contrail::simd::scalar
