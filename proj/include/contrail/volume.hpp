// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contrail/grouping.hpp"
#include "contrail/ingest.hpp"

namespace contrail::volume {

enum class Attribute { temperature, diameter, ice_label, group };
enum class Aggregation { gaussian_splat_mean, gaussian_splat_sum };

std::string to_string(Attribute a);
std::string to_string(Aggregation a);
Attribute attribute_from_string(std::string_view s);
Aggregation aggregation_from_string(std::string_view s);

struct Bounds {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Voxel values, x fastest. Sum grids hold kernel mass per voxel (particles
/// per voxel), so the grid sum is the particle count inside the bounds.
/// Mean grids hold the kernel-weighted mean of the attribute (0 where no
/// kernel reaches). Group grids hold the dominant group id (-1 for none) in
/// `values` and the ice particle density in `density`.
struct DensityGrid {
  Attribute attribute = Attribute::temperature;
  Aggregation aggregation = Aggregation::gaussian_splat_mean;
  std::array<std::size_t, 3> dims{};
  Bounds bounds;
  double kernel_sigma = 0.0;
  std::vector<double> values;
  std::vector<double> density;  // group grids only

  std::size_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return i + dims[0] * (j + dims[1] * k); }
  double spacing(int axis) const {
    return (bounds.hi[static_cast<std::size_t>(axis)] - bounds.lo[static_cast<std::size_t>(axis)]) /
           static_cast<double>(dims[static_cast<std::size_t>(axis)]);
  }
  std::array<double, 3> voxel_center(std::size_t i, std::size_t j, std::size_t k) const;
};

inline constexpr double kTruncation = 3.0;  // kernel support in sigmas

struct RasterOptions {
  std::array<std::size_t, 3> dims{128, 64, 64};
  double kernel_sigma = 0.0;
  /// Defaults to the particle bounding box padded by the kernel support.
  std::optional<Bounds> bounds;
  /// Defaults: mean for temperature/diameter, sum for ice_label.
  std::optional<Aggregation> aggregation;
  /// Required for Attribute::group.
  const grouping::GroupAssignment* groups = nullptr;
  /// 0 uses the hardware concurrency; results do not depend on it.
  unsigned threads = 0;
};

/// Splats each particle with a 3-sigma truncated Gaussian normalized to
/// unit mass, integrated exactly over each voxel along every axis.
DensityGrid rasterize(const ParticleSnapshot& snapshot, Attribute attribute, const RasterOptions& options);

/// Default bounds for a snapshot: bounding box padded by the kernel support.
Bounds padded_bounds(const ParticleSnapshot& snapshot, double kernel_sigma);

/// Mass of one particle's truncated kernel falling in voxel [e0, e1) along
/// one axis.
double axis_weight(double p, double sigma, double e0, double e1);

/// Serialized form: uint32 LE header length, JSON header, float32 LE block
/// (x fastest; group grids append the density channel).
std::string encode_grid(const DensityGrid& grid);
DensityGrid decode_grid(std::string_view bytes);
std::string grid_header_json(const DensityGrid& grid);
void export_grid(const DensityGrid& grid, const std::filesystem::path& path);
DensityGrid import_grid(const std::filesystem::path& path);

}  // namespace contrail::volume
