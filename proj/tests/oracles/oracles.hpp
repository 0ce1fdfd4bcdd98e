// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Independent brute-force reference implementations. Nothing here calls into
// the library's algorithms; they only share plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace oracle {

struct P3 {
  double x = 0, y = 0, z = 0;
};

inline double dist(const P3& a, const P3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Squared distance with the library's operation order so "exact" equality
// comparisons are meaningful: (dx^2 + dy^2) + dz^2.
inline double sq_dist(const P3& a, const P3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return (dx * dx + dy * dy) + dz * dz;
}

inline double diameter(const std::vector<P3>& pts) {
  double best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, sq_dist(pts[i], pts[j]));
  return std::sqrt(best);
}

inline double directed_hausdorff(const std::vector<P3>& a, const std::vector<P3>& b) {
  double worst = 0;
  for (const auto& p : a) {
    double best = INFINITY;
    for (const auto& q : b) best = std::min(best, sq_dist(p, q));
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

inline double hausdorff(const std::vector<P3>& a, const std::vector<P3>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

// Connected components of the eps-graph restricted to core points.
// Returns a component id per point (-1 for non-core).
inline std::vector<int> core_components(const std::vector<P3>& pts, double eps, int min_pts) {
  const std::size_t n = pts.size();
  const double e2 = eps * eps;
  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int cnt = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (sq_dist(pts[i], pts[j]) <= e2) ++cnt;
    core[i] = cnt >= min_pts;
  }
  std::vector<int> comp(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!core[s] || comp[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = next;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v)
        if (core[v] && comp[v] < 0 && sq_dist(pts[u], pts[v]) <= e2) {
          comp[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  return comp;
}

// Adjusted Rand index between two labelings (noise is an ordinary label here).
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> nij;
  std::map<int, double> ai, bj;
  for (std::size_t i = 0; i < a.size(); ++i) {
    nij[{a[i], b[i]}] += 1;
    ai[a[i]] += 1;
    bj[b[i]] += 1;
  }
  auto c2 = [](double v) { return v * (v - 1) / 2; };
  double index = 0, sa = 0, sb = 0;
  for (auto& [k, v] : nij) index += c2(v);
  for (auto& [k, v] : ai) sa += c2(v);
  for (auto& [k, v] : bj) sb += c2(v);
  const double total = c2(static_cast<double>(a.size()));
  const double expected = sa * sb / total;
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

struct P2 {
  double x = 0, y = 0;
};

inline bool inside_polygon(const std::vector<P2>& poly, double px, double py) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    if ((poly[i].y > py) != (poly[j].y > py)) {
      const double xc = poly[j].x + (py - poly[j].y) * (poly[i].x - poly[j].x) / (poly[i].y - poly[j].y);
      if (px < xc) in = !in;
    }
  }
  return in;
}

inline double monte_carlo_area(const std::vector<P2>& poly, std::size_t samples, std::uint64_t seed) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& p : poly) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s)
    if (inside_polygon(poly, ux(rng), uy(rng))) ++hits;
  return (x1 - x0) * (y1 - y0) * static_cast<double>(hits) / static_cast<double>(samples);
}

// Every sign change of f on a uniform grid of `samples` points between hi
// and lo (descending), located to the grid spacing by linear interpolation.
inline std::vector<double> dense_crossings(const std::function<double(double)>& f, double hi, double lo,
                                           std::size_t samples) {
  std::vector<double> out;
  double pt = hi, pf = f(hi);
  for (std::size_t k = 1; k < samples; ++k) {
    const double t = hi + (lo - hi) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const double ft = f(t);
    if ((pf < 0) != (ft < 0)) out.push_back(pt + (t - pt) * pf / (pf - ft));
    pt = t;
    pf = ft;
  }
  return out;
}

// Convex hull vertex set by the O(n^3) extreme-edge test (a point is a hull
// vertex iff it is an endpoint of an edge with every other point strictly on
// one side or on the segment between).
inline std::set<std::size_t> hull_vertices(const std::vector<P2>& p) {
  std::set<std::size_t> out;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool ok = true;
      for (std::size_t k = 0; k < n && ok; ++k) {
        if (k == i || k == j) continue;
        const double c = (p[j].x - p[i].x) * (p[k].y - p[i].y) - (p[j].y - p[i].y) * (p[k].x - p[i].x);
        if (c < 0) ok = false;
        if (c == 0) {
          // collinear: must lie within the segment for (i, j) to be an extreme edge
          const double t = (p[k].x - p[i].x) * (p[j].x - p[i].x) + (p[k].y - p[i].y) * (p[j].y - p[i].y);
          const double l = (p[j].x - p[i].x) * (p[j].x - p[i].x) + (p[j].y - p[i].y) * (p[j].y - p[i].y);
          if (t < 0 || t > l) ok = false;
        }
      }
      if (ok) {
        out.insert(i);
        out.insert(j);
      }
    }
  return out;
}

// Mass of a unit Gaussian (mean p, sd sigma) truncated to p +- cut*sigma and
// renormalized, over [a, b], by composite Simpson quadrature.
inline double truncated_gaussian_mass(double p, double sigma, double cut, double a, double b, int panels = 2000) {
  a = std::max(a, p - cut * sigma);
  b = std::min(b, p + cut * sigma);
  if (!(b > a)) return 0.0;
  auto pdf = [&](double x) {
    const double u = (x - p) / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * M_PI));
  };
  const double h = (b - a) / panels;
  double s = pdf(a) + pdf(b);
  for (int i = 1; i < panels; ++i) s += pdf(a + i * h) * (i % 2 ? 4.0 : 2.0);
  const double total = 1.0 - std::erfc(cut / std::sqrt(2.0));
  return s * h / 3.0 / total;
}

// Same quantity in closed form via erfc.
inline double truncated_gaussian_mass_cf(double p, double sigma, double cut, double a, double b) {
  a = std::max(a, p - cut * sigma);
  b = std::min(b, p + cut * sigma);
  if (!(b > a)) return 0.0;
  auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - p) / (sigma * std::sqrt(2.0))); };
  return (cdf(b) - cdf(a)) / (1.0 - std::erfc(cut / std::sqrt(2.0)));
}

}  // namespace oracle
