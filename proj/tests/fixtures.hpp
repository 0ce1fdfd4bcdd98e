// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Small constructed inputs shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "contrail/geometry.hpp"
#include "contrail/ingest.hpp"

namespace fixtures {

using contrail::ParticleSnapshot;
using contrail::Point2;
using contrail::PointSet;

inline PointSet uniform_square(std::size_t n, std::uint64_t seed, double side = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  PointSet p;
  for (std::size_t i = 0; i < n; ++i) p.push(u(rng), u(rng));
  return p;
}

// Uniform in a disk.
inline PointSet blob(std::size_t n, double cx, double cy, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointSet p;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(u(rng));
    const double a = 2 * std::numbers::pi * u(rng);
    p.push(cx + r * std::cos(a), cy + r * std::sin(a));
  }
  return p;
}

// Annulus r in [3, 5] with the sector |angle| < pi/4 removed.
inline PointSet c_shape(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointSet p;
  while (p.size() < n) {
    const double r = std::sqrt(9 + 16 * u(rng));
    const double a = std::numbers::pi / 4 + 1.5 * std::numbers::pi * u(rng);
    p.push(r * std::cos(a), r * std::sin(a));
  }
  return p;
}

struct NoisyLine {
  PointSet points;
  std::vector<std::int64_t> ids;
  std::vector<std::int64_t> planted;  // sorted
};

// Band of points around y = slope*x + 1 (and its mirror image when `mirror`),
// jitter +-0.1, with outliers planted 10 standard deviations outside.
inline NoisyLine noisy_line(double slope, std::size_t n, std::uint64_t seed, int upper_outliers, int lower_outliers,
                            bool mirror) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 10.0), uj(-0.1, 0.1), uo(2.0, 8.0);
  NoisyLine f;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng);
    const double y = slope * x + 1 + uj(rng);
    const bool lower = mirror && i % 2 == 1;
    f.points.push(x, lower ? -y : y);
    f.ids.push_back(static_cast<std::int64_t>(i));
  }
  double mean = 0, var = 0;
  for (double y : f.points.y) mean += y;
  mean /= static_cast<double>(n);
  for (double y : f.points.y) var += (y - mean) * (y - mean);
  const double sigma = std::sqrt(var / static_cast<double>(n));
  std::int64_t next = static_cast<std::int64_t>(n);
  for (int k = 0; k < upper_outliers; ++k) {
    const double x = uo(rng);
    f.points.push(x, slope * x + 1 + 10 * sigma);
    f.ids.push_back(next);
    f.planted.push_back(next++);
  }
  for (int k = 0; k < lower_outliers; ++k) {
    const double x = uo(rng);
    f.points.push(x, -(slope * x + 1) - 10 * sigma);
    f.ids.push_back(next);
    f.planted.push_back(next++);
  }
  return f;
}

// Star-shaped (hence simple) polygon, counter-clockwise.
inline std::vector<Point2> star_polygon(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.0, 2 * std::numbers::pi), ur(0.5, 1.5);
  std::vector<double> angles(n);
  for (auto& a : angles) a = ua(rng);
  std::sort(angles.begin(), angles.end());
  std::vector<Point2> poly;
  for (double a : angles) {
    const double r = ur(rng);
    poly.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return poly;
}

// Planar plume: x in [0, 40] m, Gaussian radial spread growing with x,
// temperature decaying with x, ice beyond 40 * (1 - ice_fraction).
inline ParticleSnapshot plume_snapshot(std::size_t n, double ice_fraction, std::uint64_t seed, double time = 0.1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 40.0), u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  ParticleSnapshot s;
  s.time = time;
  const double onset = 40.0 * (1.0 - ice_fraction);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng);
    const double y = (0.2 + 0.03 * x) * g(rng);
    const double t = 220 + 350 * std::exp(-x / 6.0);
    s.push_row(static_cast<std::int64_t>(i), x, y, std::nullopt, t, 1e-6 + 2e-6 * u(rng), x > onset, 2.4e4);
  }
  return s;
}

}  // namespace fixtures

namespace fixtures {

struct Labeled {
  PointSet points;
  std::vector<int> truth;
};

// Uniformly filled ellipses (semi-axes 4 x 1) centred on the x axis, 12 m
// apart, plus a sparse uniform background (truth -1) of noise_fraction * n points.
inline Labeled planted_bands(std::size_t n, int bands, std::uint64_t seed, int dim = 2, double noise_fraction = 0.01) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Labeled out;
  out.points.dim = dim;
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int b = static_cast<int>(i % static_cast<std::size_t>(bands));
    double px, py, pz;
    do {
      px = u(rng);
      py = u(rng);
      pz = dim == 3 ? u(rng) : 0.0;
    } while (px * px + py * py + pz * pz > 1.0);
    if (dim == 3)
      out.points.push(10 + 12.0 * b + 4 * px, py, pz);
    else
      out.points.push(10 + 12.0 * b + 4 * px, py);
    out.truth.push_back(b);
  }
  const auto background = static_cast<std::size_t>(noise_fraction * static_cast<double>(n));
  std::uniform_real_distribution<double> ux(0.0, 12.0 * bands + 8.0), uy(-3.0, 3.0);
  for (std::size_t i = 0; i < background; ++i) {
    if (dim == 3)
      out.points.push(ux(rng), uy(rng), uy(rng));
    else
      out.points.push(ux(rng), uy(rng));
    out.truth.push_back(-1);
  }
  return out;
}

}  // namespace fixtures
