// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/attributes.hpp"

#include <cmath>
#include <numbers>

#include "contrail/simd/kernels.hpp"

namespace contrail::attributes {

double total_ice_mass(std::span<const double> diameters) {
  const double cubes = simd::kernels().sum_cubes(diameters.data(), diameters.size());
  return cubes * (std::numbers::pi / 6.0) * kIceDensity;
}

double contrail_length(const PointSet& points) {
  if (points.size() < 2) return 0.0;
  return points.size() > kHullThreshold ? diameter_hull(points) : diameter_all_pairs(points);
}

double revolution_length(const PointSet& planar_points) {
  // The farthest points of two rotated circles sit on opposite sides of the
  // axis, so the swept diameter is the diameter of {(x, |y|)} u {(x, -|y|)}.
  PointSet mirrored;
  mirrored.dim = 2;
  mirrored.reserve(2 * planar_points.size());
  for (std::size_t i = 0; i < planar_points.size(); ++i) {
    const double r = std::abs(planar_points.y[i]);
    mirrored.push(planar_points.x[i], r);
    mirrored.push(planar_points.x[i], -r);
  }
  return contrail_length(mirrored);
}

ContrailSummary summarize_timestep(const ParticleSnapshot& snapshot) {
  ContrailSummary s;
  s.time = snapshot.time;
  const auto ice = snapshot.ice_indices();
  s.ice_count = ice.size();
  s.no_ice = ice.empty();

  double sum_all = 0.0;
  for (const double t : snapshot.temperature) sum_all += t;
  s.mean_temperature_all = snapshot.size() ? sum_all / static_cast<double>(snapshot.size()) : 0.0;

  if (s.no_ice) {
    s.mean_temperature = s.mean_temperature_all;
    return s;
  }

  std::vector<double> diam;
  diam.reserve(ice.size());
  double sum_ice = 0.0;
  for (const std::size_t i : ice) {
    diam.push_back(snapshot.diameter[i]);
    sum_ice += snapshot.temperature[i];
  }
  s.mean_temperature = sum_ice / static_cast<double>(ice.size());
  s.total_mass = total_ice_mass(diam);

  const PointSet planar = snapshot.ice_positions(true);
  s.length_2d = contrail_length(planar);
  if (snapshot.dim == 3) {
    s.length_3d = contrail_length(snapshot.ice_positions(false));
    s.length = s.length_3d;
  } else {
    s.length_3d = revolution_length(planar);
    s.length = s.length_2d;
  }
  return s;
}

}  // namespace contrail::attributes
