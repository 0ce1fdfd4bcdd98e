// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "contrail/attributes.hpp"
#include "contrail/grouping.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles/oracles.hpp"

using namespace contrail;
using namespace contrail::grouping;

namespace {

std::vector<oracle::P3> as_p3(const PointSet& p) {
  std::vector<oracle::P3> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back({p.x[i], p.y[i], p.dim == 3 ? p.z[i] : 0.0});
  return out;
}

// Brute-force knee: the index maximising the normalised difference.
std::size_t brute_knee(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size() - 1);
  std::size_t best = 0;
  double best_d = -INFINITY;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = static_cast<double>(i) / n - (y[i] - y.front()) / (y.back() - y.front());
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Core-point partition of a DBSCAN result must equal the oracle's components.
void check_core_partition(const PointSet& p, double eps, std::size_t min_pts) {
  const auto res = dbscan(p, eps, min_pts);
  const auto comp = oracle::core_components(as_p3(p), eps, static_cast<int>(min_pts));
  std::map<int, int> fwd, back;
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(static_cast<bool>(res.core[i]) == (comp[i] >= 0));
    if (comp[i] < 0) continue;
    auto [it, fresh] = fwd.emplace(comp[i], res.labels[i]);
    CHECK(it->second == res.labels[i]);
    auto [jt, fresh2] = back.emplace(res.labels[i], comp[i]);
    CHECK(jt->second == comp[i]);
  }
}

}  // namespace

TEST_CASE("knee of a two-level curve is the last pre-jump value") {
  const std::vector<double> curve{1, 1, 1, 1, 10, 10};
  const Knee k = find_knee(curve);
  REQUIRE(k.found);
  CHECK(k.index == brute_knee(curve));
  CHECK(curve[k.index] == 1);
}

TEST_CASE("linear and flat curves have no knee") {
  std::vector<double> lin;
  for (int i = 0; i < 11; ++i) lin.push_back(2.0 * i + 1);
  CHECK_FALSE(find_knee(lin).found);
  CHECK_FALSE(find_knee(std::vector<double>(8, 3.0)).found);
}

TEST_CASE("knee agrees with brute force on random convex curves") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 4.0);
  for (int rep = 0; rep < 50; ++rep) {
    const double p = u(rng);
    std::vector<double> y;
    for (int i = 0; i < 200; ++i) y.push_back(std::pow(i / 199.0, 1 + p) + 1e-3 * i);
    const Knee k = find_knee(y);
    REQUIRE(k.found);
    CHECK(k.index == brute_knee(y));
  }
}

TEST_CASE("select_eps on two dense blobs returns the within-blob spacing") {
  // four points 1 m apart per blob, blobs far apart: 3-NN distances are all small
  PointSet p;
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 4; ++i) p.push(100.0 * b + i, 0);
  p.push(50, 0);
  p.push(50, 10);
  const auto sel = select_eps(p, 3);
  CHECK(std::is_sorted(sel.sorted_kdist.begin(), sel.sorted_kdist.end()));
  CHECK_FALSE(sel.no_knee);
  CHECK(sel.eps == sel.sorted_kdist[brute_knee(sel.sorted_kdist)]);
  CHECK(sel.eps <= 3.0);
}

TEST_CASE("select_eps falls back to the median without a knee") {
  PointSet p;
  for (int i = 0; i < 9; ++i) p.push(i, 0);
  const auto sel = select_eps(p, 1);
  CHECK(sel.no_knee);
  CHECK(sel.eps == 1.0);
}

TEST_CASE("select_eps on a grid is close to the grid spacing") {
  PointSet p;
  const double h = 0.25;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) p.push(i * h, j * h);
  const auto sel = select_eps(p, 3);
  CHECK(std::abs(sel.eps - h) <= 0.2 * h);
}

TEST_CASE("select_eps scales with the coordinates") {
  const auto fx = fixtures::planted_bands(3000, 3, 5);
  const double e0 = select_eps(fx.points, 3).eps;
  for (double s : {0.001, 0.5, 3.0, 1000.0}) {
    PointSet q;
    for (std::size_t i = 0; i < fx.points.size(); ++i) q.push(s * fx.points.x[i], s * fx.points.y[i]);
    CHECK(std::abs(select_eps(q, 3).eps - s * e0) <= 1e-9 * s * e0);
  }
}

TEST_CASE("select_eps subsamples above the cap") {
  const auto fx = fixtures::planted_bands(5000, 3, 6);
  const auto sel = select_eps(fx.points, 3, 1000, 7);
  CHECK(sel.subsampled);
  CHECK(sel.sorted_kdist.size() == 1000);
  const auto full = select_eps(fx.points, 3);
  CHECK(sel.eps == doctest::Approx(full.eps).epsilon(0.25));
}

TEST_CASE("two blobs give two clusters") {
  PointSet p = fixtures::blob(200, 0, 0, 0.5, 1);
  const PointSet q = fixtures::blob(200, 10, 0, 0.5, 2);
  for (std::size_t i = 0; i < q.size(); ++i) p.push(q.x[i], q.y[i]);
  const auto res = dbscan(p, 1.0, 4);
  CHECK(res.cluster_count == 2);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(res.labels[i] == (i < 200 ? 0 : 1));
  check_core_partition(p, 1.0, 4);
}

TEST_CASE("isolated point is noise") {
  PointSet p;
  p.push(0, 0);
  const auto res = dbscan(p, 1.0, 2);
  CHECK(res.labels[0] == kNoise);
  CHECK(res.cluster_count == 0);
  CHECK(dbscan(p, 1.0, 1).labels[0] == 0);
}

TEST_CASE("core partition equals connected components on random fixtures") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    const int dim = 2 + rep % 2;
    PointSet p;
    p.dim = dim;
    std::uniform_real_distribution<double> u(0, 10);
    for (int i = 0; i < 300; ++i) {
      if (dim == 3)
        p.push(u(rng), u(rng) * 0.3, u(rng) * 0.3);
      else
        p.push(u(rng), u(rng) * 0.3);
    }
    const double eps = 0.3 + 0.05 * (rep % 7);
    const std::size_t min_pts = 2 + static_cast<std::size_t>(rep % 5);
    check_core_partition(p, eps, min_pts);
  }
}

TEST_CASE("labels are invariant under input permutation") {
  const auto fx = fixtures::planted_bands(2000, 4, 10);
  std::vector<std::int64_t> ids(fx.points.size());
  std::iota(ids.begin(), ids.end(), 1000);
  const auto a = dbscan(fx.points, 0.2, 4, ids);

  std::vector<std::size_t> perm(ids.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  const PointSet q = fx.points.subset(perm);
  std::vector<std::int64_t> qids;
  for (auto i : perm) qids.push_back(ids[i]);
  const auto b = dbscan(q, 0.2, 4, qids);
  for (std::size_t k = 0; k < perm.size(); ++k) CHECK(b.labels[k] == a.labels[perm[k]]);
}

TEST_CASE("planted bands are recovered") {
  for (int bands : {3, 5}) {
    const auto fx = fixtures::planted_bands(100000, bands, 20 + bands);
    const auto t0 = std::chrono::steady_clock::now();
    const auto sel = select_eps(fx.points, 3);
    const auto res = dbscan(fx.points, sel.eps, 4);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(oracle::adjusted_rand_index(res.labels, fx.truth) >= 0.95);
    CHECK(secs < 10.0);
  }
}

TEST_CASE("group_timestep") {
  SUBCASE("no ice") {
    ParticleSnapshot s;
    s.push_row(1, 0, 0, std::nullopt, 280, 1e-6, false, 2e4);
    const auto a = group_timestep(s);
    CHECK(a.no_ice);
    CHECK(a.groups.empty());
  }
  SUBCASE("one dense blob among scattered stragglers") {
    const PointSet p = fixtures::blob(500, 30, 0, 1.0, 3);
    const PointSet stray = fixtures::uniform_square(10, 4, 60.0);
    ParticleSnapshot s;
    for (std::size_t i = 0; i < p.size(); ++i) s.push_row(static_cast<std::int64_t>(i), p.x[i], p.y[i], std::nullopt, 230, 2e-6, true, 2e4);
    for (std::size_t i = 0; i < stray.size(); ++i) s.push_row(static_cast<std::int64_t>(1000 + i), stray.x[i], stray.y[i] - 30, std::nullopt, 230, 2e-6, true, 2e4);
    const auto a = group_timestep(s);
    REQUIRE(a.groups.size() == 1);
    CHECK(a.groups[0].count + a.noise_count == s.size());
    const auto comp = oracle::core_components(as_p3(s.ice_positions()), a.eps, 4);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (comp[i] >= 0) CHECK(a.labels[i] == 0);
  }
  SUBCASE("five planted groups with their masses") {
    const auto fx = fixtures::planted_bands(5000, 5, 8);
    ParticleSnapshot s;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(1e-6, 5e-6);
    std::vector<double> blob_mass(5, 0.0);
    for (std::size_t i = 0; i < fx.points.size(); ++i) {
      const double d = u(rng);
      s.push_row(static_cast<std::int64_t>(i), fx.points.x[i], fx.points.y[i], std::nullopt, 220 + fx.truth[i], d, true, 2e4);
    }
    const auto a = group_timestep(s);
    REQUIRE(a.groups.size() == 5);
    std::size_t total = a.noise_count;
    for (const auto& g : a.groups) {
      total += g.count;
      double brute = 0;
      std::set<int> truths;
      for (auto id : g.particle_ids) {
        const auto i = static_cast<std::size_t>(id);
        brute += std::numbers::pi / 6 * s.diameter[i] * s.diameter[i] * s.diameter[i] * 917;
        if (fx.truth[i] >= 0) truths.insert(fx.truth[i]);
      }
      CHECK(truths.size() == 1);
      CHECK(std::abs(g.mass - brute) <= 1e-12 * brute);
      const auto sub = attributes::summarize_timestep(s.select(std::vector<std::size_t>(g.particle_ids.begin(), g.particle_ids.end())));
      CHECK(g.mean_temperature == sub.mean_temperature);
      CHECK(g.length == sub.length);
    }
    CHECK(total == s.ice_count());
    CHECK(oracle::adjusted_rand_index(a.labels, fx.truth) >= 0.95);
  }
}

TEST_CASE("label sidecar round-trips") {
  const auto fx = fixtures::planted_bands(300, 2, 1);
  ParticleSnapshot s;
  for (std::size_t i = 0; i < fx.points.size(); ++i) s.push_row(static_cast<std::int64_t>(i) * 3, fx.points.x[i], fx.points.y[i], std::nullopt, 230, 2e-6, true, 2e4);
  const auto a = group_timestep(s);
  std::vector<std::int64_t> ids;
  std::vector<int> labels;
  parse_labels_csv(labels_to_csv(a), ids, labels);
  CHECK(ids == a.ice_ids);
  CHECK(labels == a.labels);
}
