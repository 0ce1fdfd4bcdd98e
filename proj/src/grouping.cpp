// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/grouping.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "contrail/attributes.hpp"
#include "contrail/error.hpp"
#include "contrail/kdtree.hpp"

namespace contrail::grouping {

Knee find_knee(std::span<const double> y) {
  Knee knee;
  const std::size_t n = y.size();
  if (n < 3) return knee;
  const double lo = y.front(), hi = y.back();
  if (!(hi > lo)) return knee;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xn = static_cast<double>(i) / static_cast<double>(n - 1);
    const double yn = (y[i] - lo) / (hi - lo);
    const double d = xn - yn;
    if (d > best) {
      best = d;
      knee.index = i;
      knee.found = true;
    }
  }
  return knee;
}

namespace {

double median_of_sorted(const std::vector<double>& v) {
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

EpsSelection select_eps(const PointSet& pts, std::size_t k, std::size_t sample_cap, std::uint64_t seed) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (pts.size() <= k) throw Error(ErrorKind::InvalidArgument, "select_eps needs more than k points");
  EpsSelection sel;
  sel.k = k;
  const KdTree tree(pts);

  std::vector<std::size_t> queries(pts.size());
  std::iota(queries.begin(), queries.end(), 0);
  if (sample_cap > 0 && pts.size() > sample_cap) {
    std::mt19937_64 rng(seed);
    std::shuffle(queries.begin(), queries.end(), rng);
    queries.resize(sample_cap);
    std::sort(queries.begin(), queries.end());
    sel.subsampled = true;
  }

  sel.sorted_kdist.reserve(queries.size());
  for (const auto i : queries) sel.sorted_kdist.push_back(tree.kth_distance(i, k));
  std::sort(sel.sorted_kdist.begin(), sel.sorted_kdist.end());

  const Knee knee = find_knee(sel.sorted_kdist);
  if (knee.found) {
    sel.knee_index = knee.index;
    sel.eps = sel.sorted_kdist[knee.index];
  } else {
    sel.no_knee = true;
    sel.knee_index = sel.sorted_kdist.size() / 2;
    sel.eps = median_of_sorted(sel.sorted_kdist);
  }
  return sel;
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

DbscanResult dbscan(const PointSet& pts, double eps, std::size_t min_pts, std::span<const std::int64_t> ids) {
  if (!(eps > 0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  if (min_pts < 1) throw Error(ErrorKind::InvalidArgument, "min_pts must be at least 1");
  const std::size_t n = pts.size();
  if (!ids.empty() && ids.size() != n) throw Error(ErrorKind::InvalidArgument, "ids and points differ in length");
  auto id_of = [&](std::size_t i) { return ids.empty() ? static_cast<std::int64_t>(i) : ids[i]; };

  DbscanResult out;
  out.labels.assign(n, kNoise);
  out.core.assign(n, 0);
  if (n == 0) return out;

  // eps-neighbourhoods in CSR form
  const KdTree tree(pts);
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::uint32_t> nbrs;
  std::vector<std::size_t> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    scratch.clear();
    tree.radius_of(i, eps, scratch);
    out.core[i] = scratch.size() >= min_pts;
    for (auto j : scratch) nbrs.push_back(static_cast<std::uint32_t>(j));
    offsets[i + 1] = nbrs.size();
  }

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.core[i]) continue;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e)
      if (out.core[nbrs[e]]) uf.unite(static_cast<std::uint32_t>(i), nbrs[e]);
  }

  // Preliminary order of core components by smallest core id.
  constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> root_min(n, kNone);
  for (std::size_t i = 0; i < n; ++i)
    if (out.core[i]) {
      const auto r = uf.find(static_cast<std::uint32_t>(i));
      root_min[r] = std::min(root_min[r], id_of(i));
    }

  // Border points join the reachable component with the smallest core id.
  std::vector<std::uint32_t> owner(n, std::numeric_limits<std::uint32_t>::max());
  for (std::size_t i = 0; i < n; ++i) {
    if (out.core[i]) {
      owner[i] = uf.find(static_cast<std::uint32_t>(i));
      continue;
    }
    std::int64_t best = kNone;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const auto j = nbrs[e];
      if (!out.core[j]) continue;
      const auto r = uf.find(j);
      if (root_min[r] < best) {
        best = root_min[r];
        owner[i] = r;
      }
    }
  }

  // Final numbering by smallest member id.
  std::vector<std::int64_t> member_min(n, kNone);
  for (std::size_t i = 0; i < n; ++i)
    if (owner[i] != std::numeric_limits<std::uint32_t>::max())
      member_min[owner[i]] = std::min(member_min[owner[i]], id_of(i));
  std::vector<std::pair<std::int64_t, std::uint32_t>> order;
  for (std::size_t r = 0; r < n; ++r)
    if (member_min[r] != kNone) order.push_back({member_min[r], static_cast<std::uint32_t>(r)});
  std::sort(order.begin(), order.end());
  std::vector<int> label_of_root(n, kNoise);
  for (std::size_t c = 0; c < order.size(); ++c) label_of_root[order[c].second] = static_cast<int>(c);
  for (std::size_t i = 0; i < n; ++i)
    if (owner[i] != std::numeric_limits<std::uint32_t>::max()) out.labels[i] = label_of_root[owner[i]];
  out.cluster_count = static_cast<int>(order.size());
  return out;
}

GroupAssignment group_timestep(const ParticleSnapshot& snapshot, const GroupingOptions& options) {
  GroupAssignment a;
  a.time = snapshot.time;
  a.min_pts = options.min_pts;
  const auto ice = snapshot.ice_indices();
  a.no_ice = ice.empty();
  if (a.no_ice) return a;

  for (auto i : ice) a.ice_ids.push_back(snapshot.particle_id[i]);
  const PointSet pts = snapshot.ice_positions(false);

  if (options.eps) {
    a.eps = *options.eps;
  } else if (pts.size() > options.k) {
    const EpsSelection sel = select_eps(pts, options.k, options.sample_cap);
    a.eps = sel.eps;
    a.no_knee = sel.no_knee;
    a.subsampled = sel.subsampled;
    if (!(a.eps > 0)) {
      const auto pos = std::upper_bound(sel.sorted_kdist.begin(), sel.sorted_kdist.end(), 0.0);
      a.eps = pos != sel.sorted_kdist.end() ? *pos : std::numeric_limits<double>::min();
    }
  }

  if (!(a.eps > 0)) {
    // too few ice particles to estimate a neighbourhood scale
    a.labels.assign(ice.size(), kNoise);
    a.noise_count = ice.size();
    return a;
  }

  const DbscanResult db = dbscan(pts, a.eps, options.min_pts, a.ice_ids);
  a.labels = db.labels;

  std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(db.cluster_count));
  for (std::size_t i = 0; i < ice.size(); ++i) {
    if (db.labels[i] == kNoise)
      ++a.noise_count;
    else
      rows[static_cast<std::size_t>(db.labels[i])].push_back(ice[i]);
  }
  const int dim = snapshot.dim;
  for (int g = 0; g < db.cluster_count; ++g) {
    const auto& r = rows[static_cast<std::size_t>(g)];
    const ParticleSnapshot sub = snapshot.select(r);
    const auto summary = attributes::summarize_timestep(sub);
    GroupStats s;
    s.id = g;
    s.count = r.size();
    s.particle_ids = sub.particle_id;
    std::sort(s.particle_ids.begin(), s.particle_ids.end());
    s.centroid.assign(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t i = 0; i < sub.size(); ++i) {
      s.centroid[0] += sub.x[i];
      s.centroid[1] += sub.y[i];
      if (dim == 3) s.centroid[2] += sub.z[i];
    }
    for (auto& c : s.centroid) c /= static_cast<double>(sub.size());
    s.mean_temperature = summary.mean_temperature;
    s.mass = summary.total_mass;
    s.length = summary.length;
    a.groups.push_back(std::move(s));
  }
  return a;
}

std::string labels_to_csv(const GroupAssignment& a) {
  std::string out = "particle_id,group\n";
  for (std::size_t i = 0; i < a.ice_ids.size(); ++i) {
    out += std::to_string(a.ice_ids[i]);
    out += ',';
    out += std::to_string(a.labels[i]);
    out += '\n';
  }
  return out;
}

void parse_labels_csv(const std::string& text, std::vector<std::int64_t>& ids, std::vector<int>& labels) {
  ids.clear();
  labels.clear();
  std::size_t pos = text.find('\n');
  if (pos == std::string::npos || text.compare(0, pos, "particle_id,group") != 0)
    throw Error(ErrorKind::SchemaError, "labels header");
  ++pos;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos || comma > end) throw Error(ErrorKind::SchemaError, "labels row");
    std::int64_t id = 0;
    int label = 0;
    const auto r1 = std::from_chars(text.data() + pos, text.data() + comma, id);
    const auto r2 = std::from_chars(text.data() + comma + 1, text.data() + end, label);
    if (r1.ec != std::errc() || r2.ec != std::errc()) throw Error(ErrorKind::SchemaError, "labels row");
    ids.push_back(id);
    labels.push_back(label);
    pos = end + 1;
  }
}

}  // namespace contrail::grouping
