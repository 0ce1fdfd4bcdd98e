// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "contrail/geometry.hpp"
#include "contrail/ingest.hpp"

namespace contrail::attributes {

inline constexpr double kIceDensity = 917.0;  // kg/m^3

/// Point sets larger than this take the hull path in contrail_length.
inline constexpr std::size_t kHullThreshold = 1000;

struct ContrailSummary {
  double time = 0.0;
  /// Over ice particles; over all particles when no_ice is set.
  double mean_temperature = 0.0;
  /// Over all particles regardless of phase (ensemble plots).
  double mean_temperature_all = 0.0;
  std::size_t ice_count = 0;
  double total_mass = 0.0;  // kg
  /// Headline length: length_2d for planar runs, length_3d for volumetric runs.
  double length = 0.0;
  /// Planar diameter of the ice (projected onto (x, y) for volumetric runs).
  double length_2d = 0.0;
  /// Diameter in 3D; for planar runs, of the solid of revolution about x.
  double length_3d = 0.0;
  bool no_ice = true;
};

/// Total ice mass: sum over particles of (1/6) pi d^3 rho_ice.
double total_ice_mass(std::span<const double> diameters);

/// Maximum pairwise distance; all pairs up to kHullThreshold points, hull
/// candidates above. Single point -> 0.
double contrail_length(const PointSet& points);

/// Exact diameter of the solid swept by rotating planar points about the x axis.
double revolution_length(const PointSet& planar_points);

ContrailSummary summarize_timestep(const ParticleSnapshot& snapshot);

}  // namespace contrail::attributes
