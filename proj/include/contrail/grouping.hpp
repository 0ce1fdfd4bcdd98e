// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contrail/geometry.hpp"
#include "contrail/ingest.hpp"

namespace contrail::grouping {

struct Knee {
  std::size_t index = 0;
  bool found = false;
};

/// Knee of an ascending curve sampled at equal spacing: both axes are scaled
/// to [0, 1] and the knee is the first maximum of x - y, if positive.
Knee find_knee(std::span<const double> ascending);

struct EpsSelection {
  std::size_t k = 3;
  std::vector<double> sorted_kdist;
  std::size_t knee_index = 0;
  double eps = 0.0;
  /// No knee: eps is the median k-distance.
  bool no_knee = false;
  /// k-distances were computed for a sample of the points.
  bool subsampled = false;
};

/// Requires more than k points.
EpsSelection select_eps(const PointSet& pts, std::size_t k = 3, std::size_t sample_cap = 50000,
                        std::uint64_t seed = 0);

inline constexpr int kNoise = -1;

struct DbscanResult {
  std::vector<int> labels;  // per point, kNoise for noise
  std::vector<char> core;
  int cluster_count = 0;
};

/// DBSCAN with inclusive eps-neighbourhoods counting the point itself. A
/// border point reachable from several clusters joins the one with the
/// smallest minimum core particle id; clusters are then numbered 0.. by their
/// smallest member id. `ids` defaults to the point index.
DbscanResult dbscan(const PointSet& pts, double eps, std::size_t min_pts, std::span<const std::int64_t> ids = {});

struct GroupStats {
  int id = 0;
  std::vector<std::int64_t> particle_ids;  // ascending
  std::vector<double> centroid;            // native dimensionality
  std::size_t count = 0;
  double mean_temperature = 0.0;
  double mass = 0.0;
  double length = 0.0;
};

struct GroupAssignment {
  double time = 0.0;
  double eps = 0.0;
  std::size_t min_pts = 0;
  bool no_ice = false;
  bool no_knee = false;
  bool subsampled = false;
  /// ice particle ids and their labels, in snapshot order
  std::vector<std::int64_t> ice_ids;
  std::vector<int> labels;
  std::vector<GroupStats> groups;
  std::size_t noise_count = 0;
};

struct GroupingOptions {
  std::size_t k = 3;
  std::size_t min_pts = 4;
  std::optional<double> eps;
  std::size_t sample_cap = 50000;
};

/// Selects eps and clusters the ice particles of one snapshot in its native
/// dimensionality.
GroupAssignment group_timestep(const ParticleSnapshot& snapshot, const GroupingOptions& options = {});

/// Label sidecar: "particle_id,group" rows for every ice particle.
std::string labels_to_csv(const GroupAssignment& a);
void parse_labels_csv(const std::string& text, std::vector<std::int64_t>& ids, std::vector<int>& labels);

}  // namespace contrail::grouping
