// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "contrail/delaunay.hpp"
#include "contrail/error.hpp"
#include "contrail/kdtree.hpp"

namespace contrail::shape {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

struct Loop {
  std::vector<std::size_t> vertices;
  double area = 0.0;  // signed
};

struct Component {
  double area = 0.0;
  std::vector<Loop> loops;
  std::size_t outer = 0;  // index of the largest positive loop
  std::size_t positive_loops = 0;
};

struct Analysis {
  std::vector<Component> components;  // sorted by descending area
  bool covers_all = false;
};

class AlphaComplex {
 public:
  explicit AlphaComplex(const PointSet& pts) : pts_(pts), tri_(pts) {
    const std::size_t nt = tri_.triangle_count();
    radius_.resize(nt);
    area_.resize(nt);
    std::vector<char> used(pts.size(), 0);
    for (std::size_t t = 0; t < nt; ++t) {
      const Point2 a = at(tri_.triangles[3 * t]), b = at(tri_.triangles[3 * t + 1]), c = at(tri_.triangles[3 * t + 2]);
      radius_[t] = circumradius(a, b, c);
      area_[t] = 0.5 * std::abs(orient2d(a, b, c));
      for (int k = 0; k < 3; ++k) used[static_cast<std::size_t>(tri_.triangles[3 * t + k])] = 1;
    }
    used_vertices_ = static_cast<std::size_t>(std::count(used.begin(), used.end(), 1));
  }

  const std::vector<double>& radii() const { return radius_; }

  Analysis analyze(double max_radius) const {
    const std::size_t nt = tri_.triangle_count();
    std::vector<char> keep(nt);
    for (std::size_t t = 0; t < nt; ++t) keep[t] = radius_[t] <= max_radius;

    UnionFind uf(nt);
    for (std::size_t e = 0; e < tri_.halfedges.size(); ++e) {
      const std::int64_t twin = tri_.halfedges[e];
      if (twin < 0) continue;
      const std::size_t t0 = e / 3, t1 = static_cast<std::size_t>(twin) / 3;
      if (keep[t0] && keep[t1]) uf.unite(t0, t1);
    }

    std::vector<std::size_t> comp_of(nt, SIZE_MAX);
    std::vector<std::size_t> roots;
    for (std::size_t t = 0; t < nt; ++t) {
      if (!keep[t]) continue;
      const std::size_t r = uf.find(t);
      if (comp_of[r] == SIZE_MAX) {
        comp_of[r] = roots.size();
        roots.push_back(r);
      }
      comp_of[t] = comp_of[r];
    }

    Analysis out;
    out.components.resize(roots.size());
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges(roots.size());
    std::vector<char> covered(pts_.size(), 0);
    for (std::size_t t = 0; t < nt; ++t) {
      if (!keep[t]) continue;
      const std::size_t c = comp_of[t];
      out.components[c].area += area_[t];
      for (int k = 0; k < 3; ++k) {
        const std::size_t e = 3 * t + static_cast<std::size_t>(k);
        covered[static_cast<std::size_t>(tri_.triangles[e])] = 1;
        const std::int64_t twin = tri_.halfedges[e];
        if (twin >= 0 && keep[static_cast<std::size_t>(twin) / 3]) continue;
        const auto a = static_cast<std::size_t>(tri_.triangles[e]);
        const auto b = static_cast<std::size_t>(tri_.triangles[static_cast<std::size_t>(Delaunay::next_halfedge(static_cast<std::int64_t>(e)))]);
        const auto c3 = static_cast<std::size_t>(tri_.triangles[3 * t + static_cast<std::size_t>((k + 2) % 3)]);
        // orient so the triangle interior is on the left
        if (orient2d(at(a), at(b), at(c3)) > 0)
          edges[c].push_back({a, b});
        else
          edges[c].push_back({b, a});
      }
    }
    out.covers_all = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), 1)) == used_vertices_;

    for (std::size_t c = 0; c < roots.size(); ++c) {
      Component& comp = out.components[c];
      comp.loops = trace_loops(edges[c]);
      double best = -kInf;
      for (std::size_t l = 0; l < comp.loops.size(); ++l) {
        if (comp.loops[l].area > 0) {
          ++comp.positive_loops;
          if (comp.loops[l].area > best) {
            best = comp.loops[l].area;
            comp.outer = l;
          }
        }
      }
    }
    std::stable_sort(out.components.begin(), out.components.end(),
                     [](const Component& a, const Component& b) { return a.area > b.area; });
    return out;
  }

  static bool acceptable(const Analysis& a) {
    return a.components.size() == 1 && a.covers_all && a.components[0].positive_loops == 1;
  }

  Point2 at(std::int64_t i) const { return at(static_cast<std::size_t>(i)); }
  Point2 at(std::size_t i) const { return {pts_.x[i], pts_.y[i]}; }

 private:
  // Chains directed boundary edges into closed loops. Where several loops
  // touch at a vertex, the outgoing edge turning least clockwise from the
  // reversed incoming edge is taken, which keeps every loop simple.
  std::vector<Loop> trace_loops(std::vector<std::pair<std::size_t, std::size_t>>& edges) const {
    std::sort(edges.begin(), edges.end());
    const std::size_t m = edges.size();
    auto out_range = [&](std::size_t v) {
      auto lo = std::lower_bound(edges.begin(), edges.end(), std::make_pair(v, std::size_t{0}));
      auto hi = std::lower_bound(edges.begin(), edges.end(), std::make_pair(v + 1, std::size_t{0}));
      return std::make_pair(static_cast<std::size_t>(lo - edges.begin()), static_cast<std::size_t>(hi - edges.begin()));
    };
    auto next_edge = [&](std::size_t e) {
      const auto [u, v] = edges[e];
      const auto [lo, hi] = out_range(v);
      if (hi - lo == 1) return lo;
      const Point2 pv = at(v), pu = at(u);
      const double back = std::atan2(pu.y - pv.y, pu.x - pv.x);
      std::size_t best = lo;
      double best_turn = kInf;
      for (std::size_t f = lo; f < hi; ++f) {
        const Point2 pw = at(edges[f].second);
        double turn = back - std::atan2(pw.y - pv.y, pw.x - pv.x);
        while (turn <= 0) turn += 2 * std::numbers::pi;
        while (turn > 2 * std::numbers::pi) turn -= 2 * std::numbers::pi;
        if (turn < best_turn) {
          best_turn = turn;
          best = f;
        }
      }
      return best;
    };

    std::vector<char> done(m, 0);
    std::vector<Loop> loops;
    for (std::size_t s = 0; s < m; ++s) {
      if (done[s]) continue;
      Loop loop;
      std::size_t e = s;
      while (!done[e]) {
        done[e] = 1;
        loop.vertices.push_back(edges[e].first);
        e = next_edge(e);
      }
      std::vector<Point2> poly;
      poly.reserve(loop.vertices.size());
      for (auto v : loop.vertices) poly.push_back(at(v));
      loop.area = signed_area(poly);
      loops.push_back(std::move(loop));
    }
    return loops;
  }

  const PointSet& pts_;
  Delaunay tri_;
  std::vector<double> radius_;
  std::vector<double> area_;
  std::size_t used_vertices_ = 0;
};

// Drops exactly collinear vertices and rotates to start at min x (ties: min y).
std::vector<std::size_t> normalize_loop(const PointSet& pts, std::vector<std::size_t> loop) {
  auto p = [&](std::size_t i) { return Point2{pts.x[i], pts.y[i]}; };
  bool changed = true;
  while (changed && loop.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < loop.size() && loop.size() > 3; ++i) {
      const std::size_t prev = loop[(i + loop.size() - 1) % loop.size()];
      const std::size_t next = loop[(i + 1) % loop.size()];
      if (orient2d(p(prev), p(loop[i]), p(next)) == 0.0) {
        loop.erase(loop.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  const auto start = std::min_element(loop.begin(), loop.end(), [&](std::size_t a, std::size_t b) {
    return pts.x[a] != pts.x[b] ? pts.x[a] < pts.x[b] : pts.y[a] < pts.y[b];
  });
  std::rotate(loop.begin(), start, loop.end());
  return loop;
}

std::vector<Point2> to_points(const PointSet& pts, const std::vector<std::size_t>& idx) {
  std::vector<Point2> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back({pts.x[i], pts.y[i]});
  return out;
}

PointSet planar_copy(const PointSet& pts) {
  PointSet p;
  p.dim = 2;
  p.x = pts.x;
  p.y = pts.y;
  return p;
}

}  // namespace

double alpha_seed(const PointSet& pts, std::size_t k) {
  const PointSet p = planar_copy(pts);
  if (p.size() <= k) return 0.0;
  const KdTree tree(p);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += tree.kth_distance(i, k);
  const double mean = sum / static_cast<double>(p.size());
  return mean > 0 ? 1.0 / (2.0 * mean) : 0.0;
}

AlphaShape alpha_shape(const PointSet& input, std::optional<double> alpha) {
  if (alpha && !(*alpha >= 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be non-negative");
  const PointSet pts = planar_copy(input);
  const AlphaComplex complex(pts);

  double chosen = 0.0;
  Analysis analysis;
  if (alpha) {
    chosen = *alpha;
    analysis = complex.analyze(chosen > 0 ? 1.0 / chosen : kInf);
    if (analysis.components.empty()) throw Error(ErrorKind::DegenerateInput, "no triangle survives alpha");
  } else {
    const double seed = alpha_seed(pts);
    const double seed_radius = seed > 0 ? 1.0 / seed : kInf;
    analysis = complex.analyze(seed_radius);
    chosen = seed;
    if (!AlphaComplex::acceptable(analysis)) {
      std::vector<double> radii;
      for (double r : complex.radii())
        if (std::isfinite(r) && r > seed_radius) radii.push_back(r);
      std::sort(radii.begin(), radii.end());
      radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
      // invariant: radii[hi] acceptable (or hi == size, meaning keep everything)
      std::size_t lo = 0, hi = radii.size();
      Analysis hi_analysis;
      bool have_hi = false;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        Analysis a = complex.analyze(radii[mid]);
        if (AlphaComplex::acceptable(a)) {
          hi = mid;
          hi_analysis = std::move(a);
          have_hi = true;
        } else {
          lo = mid + 1;
        }
      }
      if (hi == radii.size()) {
        chosen = 0.0;
        analysis = complex.analyze(kInf);
      } else {
        chosen = 1.0 / radii[hi];
        while (chosen > 0 && 1.0 / chosen < radii[hi]) chosen = std::nextafter(chosen, 0.0);
        analysis = have_hi ? std::move(hi_analysis) : complex.analyze(radii[hi]);
      }
    }
  }

  AlphaShape out;
  out.alpha = chosen;
  out.component_count = analysis.components.size();
  out.disconnected = out.component_count > 1;
  const Component& main = analysis.components.front();
  out.boundary_indices = normalize_loop(pts, main.loops[main.outer].vertices);
  out.boundary = to_points(pts, out.boundary_indices);
  for (std::size_t c = 1; c < analysis.components.size(); ++c) {
    const Component& other = analysis.components[c];
    if (other.positive_loops == 0) continue;
    out.other_components.push_back(to_points(pts, normalize_loop(pts, other.loops[other.outer].vertices)));
  }
  return out;
}

NoiseFilterResult filter_noise(const PointSet& pts, std::span<const std::int64_t> ids,
                               const NoiseFilterOptions& options) {
  if (ids.size() != pts.size()) throw Error(ErrorKind::InvalidArgument, "ids and points differ in length");
  NoiseFilterResult result;
  result.kept.resize(pts.size());
  std::iota(result.kept.begin(), result.kept.end(), 0);

  for (;;) {
    const auto& kept = result.kept;
    NoiseFilterReport report;
    report.removed_ids = std::move(result.report.removed_ids);

    double sigma = 0.0;
    if (options.sigma) {
      sigma = *options.sigma;
    } else if (!kept.empty()) {
      double mean = 0.0;
      for (auto i : kept) mean += pts.y[i];
      mean /= static_cast<double>(kept.size());
      double var = 0.0;
      for (auto i : kept) var += (pts.y[i] - mean) * (pts.y[i] - mean);
      sigma = std::sqrt(var / static_cast<double>(kept.size()));
    }
    report.sigma_y = sigma;
    report.threshold = options.sigma_multiplier * sigma;

    auto fit_half = [&](bool upper, LineFit& fit) {
      std::vector<double> xs, ys;
      for (auto i : kept) {
        if ((pts.y[i] >= 0) != upper) continue;
        xs.push_back(pts.x[i]);
        ys.push_back(pts.y[i]);
      }
      if (xs.size() < 2 || *std::min_element(xs.begin(), xs.end()) == *std::max_element(xs.begin(), xs.end()))
        return false;
      fit = least_squares(xs, ys);
      return true;
    };

    if (!fit_half(true, report.regression)) {
      report.insufficient_points = true;
      result.report = std::move(report);
      return result;
    }
    report.lower_fitted = fit_half(false, report.lower_regression);

    std::vector<std::size_t> next;
    next.reserve(kept.size());
    bool removed_any = false;
    for (auto i : kept) {
      const double y = pts.y[i];
      bool drop = false;
      if (y >= 0) {
        drop = y - (report.regression.slope * pts.x[i] + report.regression.intercept) > report.threshold;
      } else if (report.lower_fitted) {
        drop = (report.lower_regression.slope * pts.x[i] + report.lower_regression.intercept) - y > report.threshold;
      }
      if (drop) {
        report.removed_ids.push_back(ids[i]);
        removed_any = true;
      } else {
        next.push_back(i);
      }
    }
    result.kept = std::move(next);
    result.report = std::move(report);
    if (!options.iterate || !removed_any) break;
  }
  std::sort(result.report.removed_ids.begin(), result.report.removed_ids.end());
  return result;
}

ShapeCharacteristics shape_characteristics(std::span<const Point2> boundary, const LineFit& upper_regression) {
  ShapeCharacteristics c;
  c.slope = upper_regression.slope;
  if (boundary.empty()) return c;
  c.area = std::abs(signed_area(boundary));
  const auto [xmin, xmax] = std::minmax_element(boundary.begin(), boundary.end(),
                                                [](const Point2& a, const Point2& b) { return a.x < b.x; });
  const auto [ymin, ymax] = std::minmax_element(boundary.begin(), boundary.end(),
                                                [](const Point2& a, const Point2& b) { return a.y < b.y; });
  c.length = xmax->x - xmin->x;
  c.height = ymax->y - ymin->y;
  return c;
}

ContrailShape extract_shape(const ParticleSnapshot& snapshot, const ShapeOptions& options) {
  ContrailShape out;
  out.time = snapshot.time;
  const auto ice = snapshot.ice_indices();
  const PointSet pts = snapshot.ice_positions(true);
  std::vector<std::int64_t> ids;
  ids.reserve(ice.size());
  for (auto i : ice) ids.push_back(snapshot.particle_id[i]);

  const NoiseFilterResult filtered = filter_noise(pts, ids, options.noise);
  out.noise = filtered.report;
  out.shape = alpha_shape(pts.subset(filtered.kept), options.alpha);
  out.characteristics = shape_characteristics(out.shape.boundary, out.noise.regression);
  return out;
}

}  // namespace contrail::shape
