// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "contrail/geometry.hpp"

namespace contrail {

enum class GridKind { planar2d, volumetric3d };

std::string to_string(GridKind kind);
GridKind grid_kind_from_string(const std::string& s);

/// (temperature K, water-vapour partial pressure Pa)
struct StatePoint {
  double temperature = 0.0;
  double vapor_pressure = 0.0;
  friend bool operator==(const StatePoint&, const StatePoint&) = default;
};

struct RunManifest {
  std::string run_id;
  GridKind grid_kind = GridKind::planar2d;
  std::map<std::string, std::string> input_params;
  std::map<std::string, std::string> boundary_conditions;
  std::vector<double> timesteps;
  /// Optional exhaust/ambient states ("mixing_line" key) used for the
  /// formation-criterion diagnostic.
  std::optional<std::pair<StatePoint, StatePoint>> mixing_line;

  /// input_params and boundary_conditions merged (boundary conditions win on a clash).
  std::map<std::string, std::string> all_parameters() const;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

/// Columnar per-timestep particle data. 2D snapshots leave `z` empty.
struct ParticleSnapshot {
  double time = 0.0;
  int dim = 2;
  std::vector<std::int64_t> particle_id;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
  std::vector<double> temperature;
  std::vector<double> diameter;
  std::vector<std::uint8_t> ice_flag;
  std::vector<double> pressure;

  std::size_t size() const noexcept { return particle_id.size(); }
  std::size_t ice_count() const noexcept;

  /// Positions in native dimensionality.
  PointSet positions() const;
  /// Indices of ice particles.
  std::vector<std::size_t> ice_indices() const;
  /// Ice particle positions; `planar` projects 3D data onto (x, y).
  PointSet ice_positions(bool planar = false) const;
  /// Copy restricted to the given rows.
  ParticleSnapshot select(std::span<const std::size_t> rows) const;

  void reserve(std::size_t n);
  void push_row(std::int64_t id, double px, double py, std::optional<double> pz, double temp, double diam,
                bool ice, double pres);

  friend bool operator==(const ParticleSnapshot&, const ParticleSnapshot&) = default;
};

struct RunDiagnostics {
  /// rows dropped because a required column held NaN/Inf, per timestep
  std::map<double, std::size_t> dropped_nonfinite;
  std::size_t total_dropped() const;
  friend bool operator==(const RunDiagnostics&, const RunDiagnostics&) = default;
};

struct SimulationRun {
  RunManifest manifest;
  std::vector<ParticleSnapshot> snapshots;
  RunDiagnostics diagnostics;
  friend bool operator==(const SimulationRun&, const SimulationRun&) = default;
};

struct NumericRange {
  double min = 0.0;
  double max = 0.0;
};

struct ParameterSchema {
  /// parameter name -> observed values
  std::map<std::string, std::set<std::string>> categorical;
  /// output attribute -> observed range (filled once outputs exist)
  std::map<std::string, NumericRange> numeric;
};

struct RunQuality {
  std::string run_id;
  std::size_t nonfinite_rows = 0;
  std::size_t out_of_range_diameters = 0;
};

struct Ensemble {
  std::vector<SimulationRun> runs;
  ParameterSchema parameter_schema;
  std::vector<RunQuality> quality;
};

/// Diameters above this are flagged as implausible for exhaust ice/soot (m).
inline constexpr double kMaxPlausibleDiameter = 1e-3;

/// Shortest round-trip decimal form of a time label; used as the snapshot
/// file stem and in artifact keys.
std::string format_time(double t);

RunManifest parse_manifest(const std::string& json_text);
std::string manifest_to_json(const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

/// Parses one snapshot CSV. Rows with non-finite values are dropped and
/// counted in `dropped`.
ParticleSnapshot parse_snapshot_csv(const std::string& text, double time, GridKind kind, std::size_t* dropped);
std::string snapshot_to_csv(const ParticleSnapshot& s);

SimulationRun load_run(const std::filesystem::path& manifest_path, const std::filesystem::path& snapshot_dir);
/// Loads `<run_dir>/manifest.json` + `<run_dir>/snapshots/`.
SimulationRun load_run_dir(const std::filesystem::path& run_dir);
/// Writes the manifest and snapshots into `run_dir` (layout of load_run_dir).
void write_run(const SimulationRun& run, const std::filesystem::path& run_dir);

struct Position3 {
  double x, y, z;
};
/// Planar point (x, y) rotated by theta about the x axis, radius |y|.
Position3 rotate_about_jet_axis(double x, double y, double theta);

/// Rotates a planar snapshot about the jet (x) axis. Replica k of source
/// particle p gets id p * replication_count + k.
ParticleSnapshot reconstruct_3d(const ParticleSnapshot& snapshot_2d, std::size_t replication_count,
                                std::uint64_t rng_seed);

struct ReplicaId {
  std::int64_t source_id;
  std::size_t replica_index;
};
ReplicaId decode_replica_id(std::int64_t id, std::size_t replication_count);

Ensemble validate_ensemble(std::vector<SimulationRun> runs);

}  // namespace contrail
