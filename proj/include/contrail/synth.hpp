// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Synthetic plume ensembles with planted structure and a ground-truth file,
// written in the ingest layout.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contrail/ingest.hpp"
#include "contrail/tracking.hpp"

namespace contrail::synth {

enum class Family { narrow, wide };
std::string to_string(Family f);

/// A planted ice group: uniform-density superellipse on the (x, y) plane whose
/// centre moves downstream at `speed` (m per step) along lane `y`.
struct GroupSeed {
  std::string name;
  std::size_t count = 0;
  double y = 0.0;
  double speed = 20.0;
};

struct ScriptOp {
  enum class Kind { merge, split, appear, exit };
  Kind kind = Kind::merge;
  /// merge/split/appear: first step showing the new configuration;
  /// exit: last step the group is present.
  std::size_t step = 0;
  std::vector<std::string> from;
  std::vector<std::string> to;
  /// appear only
  std::size_t count = 0;
  double y = 0.0;
  double speed = 20.0;
};

std::string to_string(ScriptOp::Kind k);

struct RunSpec {
  std::string run_id;
  std::map<std::string, std::string> input_params;
  std::map<std::string, std::string> boundary_conditions;
  StatePoint exhaust;
  StatePoint ambient;
  std::size_t timesteps = 1;
  double dt = 0.5;  // s between snapshots
  std::size_t non_ice_particles = 2000;
  double ice_onset_distance = 20.0;  // m
  /// Multi-timestep runs: planted groups and their event script.
  std::vector<GroupSeed> groups;
  std::vector<ScriptOp> script;
  /// Final-structure runs: one plume of this family instead of groups.
  std::optional<Family> shape_family;
  std::size_t plume_particles = 0;
  double plume_length = 300.0;  // m
  double plume_height = 10.0;   // m, half-height at the far end
  /// Ground-truth label not visible in the parameters.
  std::string hidden_group;
};

struct SynthConfig {
  std::uint64_t seed = 7;
  /// Sparse ice background as a fraction of planted ice particles.
  double straggler_fraction = 0.01;
  std::vector<RunSpec> runs;
};

/// 29 runs: 19 multi-timestep runs with identical parameters (two hidden
/// ambient-temperature groups, shared event script) and 10 final-structure
/// runs in narrow and wide families.
SynthConfig default_config(std::uint64_t seed = 7, std::size_t particles_per_step = 20000);

/// Small ensemble for tests: `multi` multi-timestep runs and `finals`
/// final-structure runs (alternating families).
SynthConfig small_config(std::uint64_t seed, std::size_t multi, std::size_t finals, std::size_t particles_per_step,
                         std::size_t timesteps = 10);

/// Default 10-step script: two merges, a split, an appearance and an exit.
void default_script(RunSpec& run, std::size_t planted_ice);

std::string config_to_json(const SynthConfig& config);
SynthConfig config_from_json(const std::string& text);

/// Throws Error(ConfigError) on inconsistent scripts or run specs.
void validate_config(const SynthConfig& config);

/// Expected tracking events of a multi-timestep run.
std::vector<tracking::Event> expected_events(const RunSpec& run);

struct GenerateSummary {
  std::size_t runs = 0;
  std::size_t snapshots = 0;
  std::size_t particles = 0;
};

/// Writes <out>/<run_id>/{manifest.json,snapshots/} per run and
/// <out>/ground_truth.json. Byte-identical for a given config.
GenerateSummary generate_synthetic(const SynthConfig& config, const std::filesystem::path& out_dir);

/// Filter predicate planted in the default ensemble.
inline const std::map<std::string, std::string> kPlantedFilter{{"engine", "two-stream"}, {"grid", "coarse"}};

}  // namespace contrail::synth
