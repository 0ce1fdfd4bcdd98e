// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contrail/grouping.hpp"

namespace contrail::tracking {

struct Node {
  std::string id;  // "c<column>g<group>"
  std::size_t column = 0;
  double time = 0.0;
  int group_id = 0;
  std::size_t count = 0;
  double mean_temperature = 0.0;
  double mass = 0.0;
  double length = 0.0;
  double radius_hint = 0.0;  // proportional to sqrt(count), largest node = 1
  std::vector<double> centroid;
  std::size_t row = 0;
};

struct Edge {
  std::size_t from = 0;  // node index
  std::size_t to = 0;
  std::size_t weight = 0;
  double overlap_fraction = 0.0;  // weight / count(from)
};

enum class EventType { merge, split, appear, exit };
std::string to_string(EventType t);

struct Event {
  EventType type = EventType::merge;
  double time = 0.0;
  /// merge: [child, parents...]; split: [parent, children...]; appear/exit: [node]
  std::vector<std::string> node_ids;
  /// exit only: the group's centroid lies near the domain boundary
  std::optional<bool> near_boundary;
};

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct TrackingOptions {
  /// Edges with a smaller overlap fraction are dropped (0 keeps all).
  double min_overlap_fraction = 0.0;
  /// Below this fraction of ids carried over, consecutive timesteps are
  /// linked by centroid distance instead of identity.
  double stable_id_fraction = 0.5;
  double gate_eps_multiple = 3.0;
  /// Per-timestep particle domain for the exit evidence (optional).
  std::vector<Box> domains;
  /// Distance to a domain face, as a fraction of that axis' extent, that
  /// counts as near the boundary.
  double boundary_margin = 0.1;
};

struct TrackingGraph {
  std::vector<double> times;
  std::vector<std::vector<std::size_t>> columns;  // node indices per timestep
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<Event> events;
  /// column pairs (t, t+1) linked by centroid proximity, by index of t
  std::vector<std::size_t> approximate_links;
};

/// Assignments must be sorted by time.
TrackingGraph build_tracking_graph(const std::vector<grouping::GroupAssignment>& assignments,
                                   const TrackingOptions& options = {});

/// Backward row assignment: the last column is ordered by (count desc,
/// group id); earlier nodes are inserted next to the row of their heaviest
/// child. Barycenter sweeps and sifting then refine it, keeping the layout with
/// the fewest crossings, never more than the id ordering.
void layout_tracking_graph(TrackingGraph& graph);

/// Edge crossings between consecutive columns for the given rows.
std::size_t count_crossings(const TrackingGraph& graph, const std::vector<std::size_t>& rows);
std::size_t count_crossings(const TrackingGraph& graph);

/// Rows by group id within each column.
std::vector<std::size_t> naive_rows(const TrackingGraph& graph);

}  // namespace contrail::tracking
