// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contrail/artifacts.hpp"
#include "contrail/ingest.hpp"
#include "contrail/volume.hpp"

namespace contrail::pipeline {

inline constexpr const char* kPipelineVersion = "1.0.0";

/// Attributes with filament series and Gower numeric ranges (final timestep).
inline const std::vector<std::string> kOutputAttributes{"mean_temperature", "ice_count", "total_mass", "length"};

struct PipelineConfig {
  std::optional<double> alpha;  // empty: automatic
  std::size_t k = 3;
  std::size_t min_pts = 4;
  std::size_t replication = 8;
  std::array<std::size_t, 3> grid_dims{128, 64, 64};
  std::optional<double> kernel_sigma;  // empty: the timestep's clustering eps
  std::size_t knn_k = 5;
  std::uint64_t seed = 7;
  std::vector<volume::Attribute> volume_attributes{volume::Attribute::temperature, volume::Attribute::group};
  /// Rasterize every timestep instead of the final one only.
  bool volume_all_timesteps = false;
  /// Runs processed concurrently; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Accepts "auto" for alpha and kernel_sigma; unknown keys are a ConfigError.
PipelineConfig config_from_json(const std::string& text);
artifacts::Json config_json(const PipelineConfig& config);

struct RunStatus {
  std::string run_id;
  bool ok = false;
  std::string error_kind;
  std::string error;
};

struct BundleSummary {
  std::filesystem::path root;
  std::vector<RunStatus> runs;
  /// relative path -> sha256
  std::map<std::string, std::string> checksums;

  std::size_t failed() const;
};

/// Preprocesses every run directory (one holding manifest.json) under
/// `ensemble_dir` into `out_dir`. Run-level failures are recorded in
/// bundle.json and do not stop the others.
BundleSummary run_pipeline(const std::filesystem::path& ensemble_dir, const std::filesystem::path& out_dir,
                           const PipelineConfig& config = {});

artifacts::GlyphDiff compute_glyph_diff(const Ensemble& ensemble);

inline constexpr double kRelativeChangeGuard = 1e-12;

/// Series per attribute for one run.
std::vector<artifacts::FilamentPoint> filament_series(const std::vector<double>& times,
                                                      const std::vector<double>& values);
artifacts::FilamentSet compute_filaments(const std::map<std::string, std::vector<attributes::ContrailSummary>>& summaries,
                                         const std::vector<std::string>& attributes = kOutputAttributes);

/// Value of a named summary attribute.
double summary_value(const attributes::ContrailSummary& s, const std::string& attribute);

/// Recomputes every checksum listed in bundle.json; returns the mismatching
/// or missing paths.
std::vector<std::string> verify_bundle(const std::filesystem::path& bundle_root);

/// The artifact root: `fallback` unless CONTRAIL_ARTIFACT_ROOT is set.
std::filesystem::path artifact_root(const std::filesystem::path& fallback);

}  // namespace contrail::pipeline
