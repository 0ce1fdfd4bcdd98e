// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "contrail/geometry.hpp"
#include "contrail/ingest.hpp"

namespace contrail::shape {

struct ShapeCharacteristics {
  double area = 0.0;    // m^2
  double length = 0.0;  // x-extent of the boundary, m
  double height = 0.0;  // y-extent of the boundary, m
  double slope = 0.0;   // upper-half regression slope
};

// Alpha is an inverse radius: a Delaunay triangle survives when its
// circumradius is at most 1/alpha. Larger alpha gives a tighter shape;
// alpha = 0 keeps every triangle (the convex hull).
struct AlphaShape {
  double alpha = 0.0;
  /// Counter-clockwise, starting at the minimum-x vertex (ties: minimum y),
  /// not repeated at the end.
  std::vector<Point2> boundary;
  std::vector<std::size_t> boundary_indices;
  /// Set when the surviving triangles form more than one component; the
  /// boundary is then that of the largest one (by area).
  bool disconnected = false;
  std::size_t component_count = 0;
  std::vector<std::vector<Point2>> other_components;
};

/// Mean distance to the 3rd nearest neighbour halved and inverted: the
/// starting point of the automatic alpha search.
double alpha_seed(const PointSet& pts, std::size_t k = 3);

/// Alpha shape of planar points; `alpha` empty selects it automatically (the
/// largest alpha from the seed downward whose shape is a single loop covering
/// every point). Throws Error(DegenerateInput) for fewer than 3 distinct or
/// collinear points, and when no triangle survives an explicit alpha.
AlphaShape alpha_shape(const PointSet& pts, std::optional<double> alpha = std::nullopt);

struct NoiseFilterOptions {
  double sigma_multiplier = 5.0;
  /// Recompute sigma and the fits on the kept points until nothing changes.
  bool iterate = false;
  /// Use this sigma instead of the standard deviation of the input.
  std::optional<double> sigma;
};

struct NoiseFilterReport {
  LineFit regression;        // upper half (y >= 0)
  LineFit lower_regression;  // lower half (y < 0)
  bool lower_fitted = false;
  double sigma_y = 0.0;
  double threshold = 0.0;
  std::vector<std::int64_t> removed_ids;
  /// Fewer than two distinct x in the upper half; nothing was filtered.
  bool insufficient_points = false;
};

struct NoiseFilterResult {
  std::vector<std::size_t> kept;  // indices into the input
  NoiseFilterReport report;
};

/// Drops points lying more than sigma_multiplier * sigma_y above the upper
/// half's regression line, and the mirror image below the lower half's own
/// line. sigma_y is the population standard deviation of all input y.
NoiseFilterResult filter_noise(const PointSet& pts, std::span<const std::int64_t> ids,
                               const NoiseFilterOptions& options = {});

ShapeCharacteristics shape_characteristics(std::span<const Point2> boundary, const LineFit& upper_regression);

struct ShapeOptions {
  std::optional<double> alpha;
  NoiseFilterOptions noise;
};

struct ContrailShape {
  double time = 0.0;
  AlphaShape shape;
  ShapeCharacteristics characteristics;
  NoiseFilterReport noise;
};

/// Noise filter, alpha shape and characteristics of a snapshot's ice
/// particles in the (x, y) plane.
ContrailShape extract_shape(const ParticleSnapshot& snapshot, const ShapeOptions& options = {});

}  // namespace contrail::shape
