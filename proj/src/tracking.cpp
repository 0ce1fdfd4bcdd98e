// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "contrail/error.hpp"

namespace contrail::tracking {

std::string to_string(EventType t) {
  switch (t) {
    case EventType::merge: return "merge";
    case EventType::split: return "split";
    case EventType::appear: return "appear";
    case EventType::exit: return "exit";
  }
  return "merge";
}

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

bool near_boundary(const std::vector<double>& c, const Box& box, double margin) {
  for (std::size_t a = 0; a < std::min(c.size(), box.lo.size()); ++a) {
    const double extent = box.hi[a] - box.lo[a];
    if (extent <= 0) continue;
    if (c[a] - box.lo[a] <= margin * extent || box.hi[a] - c[a] <= margin * extent) return true;
  }
  return false;
}

}  // namespace

TrackingGraph build_tracking_graph(const std::vector<grouping::GroupAssignment>& assignments,
                                   const TrackingOptions& options) {
  for (std::size_t i = 1; i < assignments.size(); ++i)
    if (!(assignments[i].time > assignments[i - 1].time))
      throw Error(ErrorKind::MonotonicityError, "assignments not sorted by time");

  TrackingGraph g;
  std::size_t max_count = 0;
  for (std::size_t c = 0; c < assignments.size(); ++c) {
    const auto& a = assignments[c];
    g.times.push_back(a.time);
    g.columns.emplace_back();
    for (const auto& grp : a.groups) {
      Node n;
      n.id = "c" + std::to_string(c) + "g" + std::to_string(grp.id);
      n.column = c;
      n.time = a.time;
      n.group_id = grp.id;
      n.count = grp.count;
      n.mean_temperature = grp.mean_temperature;
      n.mass = grp.mass;
      n.length = grp.length;
      n.centroid = grp.centroid;
      max_count = std::max(max_count, grp.count);
      g.columns.back().push_back(g.nodes.size());
      g.nodes.push_back(std::move(n));
    }
  }
  for (auto& n : g.nodes)
    n.radius_hint = max_count ? std::sqrt(static_cast<double>(n.count) / static_cast<double>(max_count)) : 0.0;

  auto node_of = [&](std::size_t column, int group) { return g.columns[column][static_cast<std::size_t>(group)]; };

  for (std::size_t c = 0; c + 1 < assignments.size(); ++c) {
    const auto& a = assignments[c];
    const auto& b = assignments[c + 1];
    std::unordered_map<std::int64_t, int> before;
    before.reserve(a.ice_ids.size());
    for (std::size_t i = 0; i < a.ice_ids.size(); ++i) before.emplace(a.ice_ids[i], a.labels[i]);

    std::size_t carried = 0;
    std::map<std::pair<int, int>, std::size_t> shared;
    for (std::size_t i = 0; i < b.ice_ids.size(); ++i) {
      const auto it = before.find(b.ice_ids[i]);
      if (it == before.end()) continue;
      ++carried;
      if (it->second >= 0 && b.labels[i] >= 0) ++shared[{it->second, b.labels[i]}];
    }

    const bool stable =
        b.ice_ids.empty() || static_cast<double>(carried) >= options.stable_id_fraction * static_cast<double>(b.ice_ids.size());
    if (stable) {
      for (const auto& [key, w] : shared) {
        const std::size_t from = node_of(c, key.first), to = node_of(c + 1, key.second);
        const double frac = static_cast<double>(w) / static_cast<double>(g.nodes[from].count);
        if (frac < options.min_overlap_fraction) continue;
        g.edges.push_back({from, to, w, frac});
      }
    } else {
      g.approximate_links.push_back(c);
      const double gate = options.gate_eps_multiple * a.eps;
      for (const auto& ga : a.groups)
        for (const auto& gb : b.groups)
          if (distance(ga.centroid, gb.centroid) <= gate) {
            const std::size_t from = node_of(c, ga.id), to = node_of(c + 1, gb.id);
            g.edges.push_back({from, to, 1, 1.0 / static_cast<double>(g.nodes[from].count)});
          }
    }
  }

  std::vector<std::vector<std::size_t>> in(g.nodes.size()), out(g.nodes.size());
  for (const auto& e : g.edges) {
    in[e.to].push_back(e.from);
    out[e.from].push_back(e.to);
  }
  const std::size_t last = g.columns.empty() ? 0 : g.columns.size() - 1;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const Node& n = g.nodes[i];
    if (in[i].size() >= 2) {
      Event ev{EventType::merge, n.time, {n.id}, std::nullopt};
      for (auto p : in[i]) ev.node_ids.push_back(g.nodes[p].id);
      g.events.push_back(std::move(ev));
    }
    if (out[i].size() >= 2) {
      Event ev{EventType::split, g.nodes[out[i].front()].time, {n.id}, std::nullopt};
      for (auto ch : out[i]) ev.node_ids.push_back(g.nodes[ch].id);
      g.events.push_back(std::move(ev));
    }
    if (n.column > 0 && in[i].empty()) g.events.push_back({EventType::appear, n.time, {n.id}, std::nullopt});
    if (n.column < last && out[i].empty()) {
      Event ev{EventType::exit, n.time, {n.id}, std::nullopt};
      if (n.column < options.domains.size())
        ev.near_boundary = near_boundary(n.centroid, options.domains[n.column], options.boundary_margin);
      g.events.push_back(std::move(ev));
    }
  }
  std::stable_sort(g.events.begin(), g.events.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.type != b.type) return a.type < b.type;
    return a.node_ids < b.node_ids;
  });

  layout_tracking_graph(g);
  return g;
}

namespace {

// Sifting: each node moves to the position in its column with the fewest
// crossings, only when that is a strict improvement.
void sift_rows(TrackingGraph& g) {
  std::vector<std::vector<std::size_t>> nbr(g.nodes.size());
  for (const auto& e : g.edges) {
    nbr[e.from].push_back(e.to);
    nbr[e.to].push_back(e.from);
  }
  std::vector<std::vector<std::size_t>> order(g.columns.size());
  for (std::size_t c = 0; c < g.columns.size(); ++c) {
    order[c] = g.columns[c];
    std::sort(order[c].begin(), order[c].end(), [&](auto a, auto b) { return g.nodes[a].row < g.nodes[b].row; });
  }
  // crossings between edges of u and v when u sits above v
  auto above = [&](std::size_t u, std::size_t v) {
    long n = 0;
    for (auto a : nbr[u])
      for (auto b : nbr[v])
        if (g.nodes[a].column == g.nodes[b].column && g.nodes[a].row > g.nodes[b].row) ++n;
    return n;
  };
  const std::size_t max_sweeps = 4 * g.nodes.size() + 4;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (auto& col : order) {
      for (std::size_t k = 0; k < col.size(); ++k) {
        const std::size_t u = col[k];
        std::size_t p = static_cast<std::size_t>(std::find(col.begin(), col.end(), u) - col.begin());
        long best = 0, delta = 0;
        std::size_t target = p;
        for (std::size_t q = p; q-- > 0;) {
          delta += above(u, col[q]) - above(col[q], u);
          if (delta < best) best = delta, target = q;
        }
        delta = 0;
        for (std::size_t q = p + 1; q < col.size(); ++q) {
          delta += above(col[q], u) - above(u, col[q]);
          if (delta < best) best = delta, target = q;
        }
        if (target == p) continue;
        col.erase(col.begin() + static_cast<std::ptrdiff_t>(p));
        col.insert(col.begin() + static_cast<std::ptrdiff_t>(target), u);
        for (std::size_t r = 0; r < col.size(); ++r) g.nodes[col[r]].row = r;
        changed = true;
      }
    }
    if (!changed) break;
  }
}

// Reorders every column by the mean row of its neighbours in the previous
// (forward) or next column; nodes without such neighbours keep their row.
void barycenter_sweep(TrackingGraph& g, bool forward) {
  std::vector<std::vector<std::size_t>> prev(g.nodes.size()), next(g.nodes.size());
  for (const auto& e : g.edges) {
    prev[e.to].push_back(e.from);
    next[e.from].push_back(e.to);
  }
  const std::size_t n = g.columns.size();
  for (std::size_t s = 1; s < n; ++s) {
    const std::size_t c = forward ? s : n - 1 - s;
    std::vector<std::pair<double, std::size_t>> keyed;
    for (const auto i : g.columns[c]) {
      const auto& nb = forward ? prev[i] : next[i];
      double key = static_cast<double>(g.nodes[i].row);
      if (!nb.empty()) {
        key = 0.0;
        for (auto j : nb) key += static_cast<double>(g.nodes[j].row);
        key /= static_cast<double>(nb.size());
      }
      keyed.push_back({key, i});
    }
    std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return g.nodes[a.second].row < g.nodes[b.second].row;
    });
    for (std::size_t r = 0; r < keyed.size(); ++r) g.nodes[keyed[r].second].row = r;
  }
}

// Alternating sweeps followed by sifting; the layout with the fewest
// crossings seen is kept, starting from the backward pass.
void refine_rows(TrackingGraph& g) {
  auto rows_of = [&] {
    std::vector<std::size_t> rows;
    for (const auto& n : g.nodes) rows.push_back(n.row);
    return rows;
  };
  sift_rows(g);
  auto best = rows_of();
  std::size_t best_crossings = count_crossings(g, best);
  for (int iter = 0; iter < 8 && best_crossings > 0; ++iter) {
    barycenter_sweep(g, iter % 2 == 0);
    sift_rows(g);
    const auto rows = rows_of();
    const std::size_t c = count_crossings(g, rows);
    if (c < best_crossings) {
      best_crossings = c;
      best = rows;
    }
  }
  // The id ordering, sifted, competes as another start.
  if (best_crossings > 0) {
    const auto naive = naive_rows(g);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) g.nodes[i].row = naive[i];
    sift_rows(g);
    for (const auto& cand : {naive, rows_of()}) {
      const std::size_t c = count_crossings(g, cand);
      if (c < best_crossings) {
        best_crossings = c;
        best = cand;
      }
    }
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) g.nodes[i].row = best[i];
}

}  // namespace

void layout_tracking_graph(TrackingGraph& g) {
  if (g.columns.empty()) return;
  std::vector<std::vector<const Edge*>> out(g.nodes.size());
  for (const auto& e : g.edges) out[e.from].push_back(&e);

  auto by_count = [&](std::size_t a, std::size_t b) {
    const Node &na = g.nodes[a], &nb = g.nodes[b];
    return na.count != nb.count ? na.count > nb.count : na.group_id < nb.group_id;
  };

  std::vector<std::size_t> order = g.columns.back();
  std::sort(order.begin(), order.end(), by_count);
  for (std::size_t r = 0; r < order.size(); ++r) g.nodes[order[r]].row = r;

  constexpr std::size_t kNoChild = std::numeric_limits<std::size_t>::max();
  for (std::size_t c = g.columns.size() - 1; c-- > 0;) {
    struct Want {
      std::size_t row;
      double barycenter;  // weighted mean child row, orders parents sharing a row
      std::size_t node;
    };
    std::vector<Want> desired;
    for (const auto i : g.columns[c]) {
      const Edge* heaviest = nullptr;
      double wsum = 0.0, rsum = 0.0;
      for (const Edge* e : out[i]) {
        if (!heaviest || e->weight > heaviest->weight ||
            (e->weight == heaviest->weight && g.nodes[e->to].row < g.nodes[heaviest->to].row))
          heaviest = e;
        wsum += static_cast<double>(e->weight);
        rsum += static_cast<double>(e->weight) * static_cast<double>(g.nodes[e->to].row);
      }
      desired.push_back({heaviest ? g.nodes[heaviest->to].row : kNoChild, wsum > 0 ? rsum / wsum : 0.0, i});
    }
    std::sort(desired.begin(), desired.end(), [&](const Want& a, const Want& b) {
      if (a.row != b.row) return a.row < b.row;
      if (a.barycenter != b.barycenter) return a.barycenter < b.barycenter;
      return by_count(a.node, b.node);
    });
    // compact rows: insertion order is the row order
    for (std::size_t r = 0; r < desired.size(); ++r) g.nodes[desired[r].node].row = r;
  }

  refine_rows(g);
}

std::size_t count_crossings(const TrackingGraph& g, const std::vector<std::size_t>& rows) {
  std::size_t crossings = 0;
  for (std::size_t a = 0; a < g.edges.size(); ++a) {
    for (std::size_t b = a + 1; b < g.edges.size(); ++b) {
      const Edge &ea = g.edges[a], &eb = g.edges[b];
      if (g.nodes[ea.from].column != g.nodes[eb.from].column) continue;
      const auto ra = rows[ea.from], rb = rows[eb.from], sa = rows[ea.to], sb = rows[eb.to];
      if ((ra < rb && sa > sb) || (ra > rb && sa < sb)) ++crossings;
    }
  }
  return crossings;
}

std::size_t count_crossings(const TrackingGraph& g) {
  std::vector<std::size_t> rows;
  for (const auto& n : g.nodes) rows.push_back(n.row);
  return count_crossings(g, rows);
}

std::vector<std::size_t> naive_rows(const TrackingGraph& g) {
  std::vector<std::size_t> rows(g.nodes.size());
  for (const auto& col : g.columns)
    for (const auto i : col) rows[i] = static_cast<std::size_t>(g.nodes[i].group_id);
  return rows;
}

}  // namespace contrail::tracking
