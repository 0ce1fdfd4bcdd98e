// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "contrail/error.hpp"
#include "contrail/io.hpp"

namespace contrail {

using nlohmann::json;

std::string to_string(GridKind kind) { return kind == GridKind::planar2d ? "planar2d" : "volumetric3d"; }

GridKind grid_kind_from_string(const std::string& s) {
  if (s == "planar2d") return GridKind::planar2d;
  if (s == "volumetric3d") return GridKind::volumetric3d;
  throw Error(ErrorKind::SchemaError, "grid_kind");
}

std::map<std::string, std::string> RunManifest::all_parameters() const {
  auto all = input_params;
  for (const auto& [k, v] : boundary_conditions) all[k] = v;
  return all;
}

std::size_t ParticleSnapshot::ice_count() const noexcept {
  return static_cast<std::size_t>(std::count(ice_flag.begin(), ice_flag.end(), std::uint8_t{1}));
}

PointSet ParticleSnapshot::positions() const {
  PointSet p;
  p.dim = dim;
  p.x = x;
  p.y = y;
  if (dim == 3) p.z = z;
  return p;
}

std::vector<std::size_t> ParticleSnapshot::ice_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < size(); ++i)
    if (ice_flag[i]) idx.push_back(i);
  return idx;
}

PointSet ParticleSnapshot::ice_positions(bool planar) const {
  PointSet p;
  p.dim = planar ? 2 : dim;
  const auto idx = ice_indices();
  p.reserve(idx.size());
  for (const std::size_t i : idx) {
    if (p.dim == 3)
      p.push(x[i], y[i], z[i]);
    else
      p.push(x[i], y[i]);
  }
  return p;
}

ParticleSnapshot ParticleSnapshot::select(std::span<const std::size_t> rows) const {
  ParticleSnapshot out;
  out.time = time;
  out.dim = dim;
  out.reserve(rows.size());
  for (const std::size_t i : rows) {
    out.push_row(particle_id[i], x[i], y[i], dim == 3 ? std::optional<double>(z[i]) : std::nullopt, temperature[i],
                 diameter[i], ice_flag[i] != 0, pressure[i]);
  }
  return out;
}

void ParticleSnapshot::reserve(std::size_t n) {
  particle_id.reserve(n);
  x.reserve(n);
  y.reserve(n);
  if (dim == 3) z.reserve(n);
  temperature.reserve(n);
  diameter.reserve(n);
  ice_flag.reserve(n);
  pressure.reserve(n);
}

void ParticleSnapshot::push_row(std::int64_t id, double px, double py, std::optional<double> pz, double temp,
                                double diam, bool ice, double pres) {
  particle_id.push_back(id);
  x.push_back(px);
  y.push_back(py);
  if (pz) z.push_back(*pz);
  temperature.push_back(temp);
  diameter.push_back(diam);
  ice_flag.push_back(ice ? 1 : 0);
  pressure.push_back(pres);
}

std::size_t RunDiagnostics::total_dropped() const {
  std::size_t n = 0;
  for (const auto& [t, c] : dropped_nonfinite) n += c;
  return n;
}

std::string format_time(double t) { return format_double(t); }

// ---------------------------------------------------------------------------
// manifest

RunManifest parse_manifest(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("manifest: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::SchemaError, "manifest");
  RunManifest m;
  auto require = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw Error(ErrorKind::SchemaError, key);
    return j.at(key);
  };
  const auto& id = require("run_id");
  if (!id.is_string() || id.get<std::string>().empty()) throw Error(ErrorKind::SchemaError, "run_id");
  m.run_id = id.get<std::string>();
  const auto& kind = require("grid_kind");
  if (!kind.is_string()) throw Error(ErrorKind::SchemaError, "grid_kind");
  m.grid_kind = grid_kind_from_string(kind.get<std::string>());

  auto read_map = [&](const char* key, std::map<std::string, std::string>& out) {
    const auto& obj = require(key);
    if (!obj.is_object()) throw Error(ErrorKind::SchemaError, key);
    for (const auto& [k, v] : obj.items()) {
      if (!v.is_string()) throw Error(ErrorKind::SchemaError, std::string(key) + "." + k);
      out[k] = v.get<std::string>();
    }
    if (out.empty()) throw Error(ErrorKind::SchemaError, key);
  };
  read_map("input_params", m.input_params);
  read_map("boundary_conditions", m.boundary_conditions);

  const auto& ts = require("timesteps");
  if (!ts.is_array() || ts.empty()) throw Error(ErrorKind::SchemaError, "timesteps");
  for (const auto& t : ts) {
    if (!t.is_number()) throw Error(ErrorKind::SchemaError, "timesteps");
    m.timesteps.push_back(t.get<double>());
  }
  for (std::size_t i = 1; i < m.timesteps.size(); ++i) {
    if (!(m.timesteps[i] > m.timesteps[i - 1]))
      throw Error(ErrorKind::MonotonicityError, "timesteps not strictly increasing at index " + std::to_string(i));
  }

  if (j.contains("mixing_line")) {
    const auto& ml = j.at("mixing_line");
    auto state = [&](const char* which) {
      if (!ml.contains(which) || !ml.at(which).contains("T") || !ml.at(which).contains("P_v"))
        throw Error(ErrorKind::SchemaError, std::string("mixing_line.") + which);
      return StatePoint{ml.at(which).at("T").get<double>(), ml.at(which).at("P_v").get<double>()};
    };
    m.mixing_line = std::make_pair(state("exhaust"), state("ambient"));
  }
  return m;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["run_id"] = m.run_id;
  j["grid_kind"] = to_string(m.grid_kind);
  j["input_params"] = m.input_params;
  j["boundary_conditions"] = m.boundary_conditions;
  j["timesteps"] = m.timesteps;
  if (m.mixing_line) {
    j["mixing_line"] = {
        {"exhaust", {{"T", m.mixing_line->first.temperature}, {"P_v", m.mixing_line->first.vapor_pressure}}},
        {"ambient", {{"T", m.mixing_line->second.temperature}, {"P_v", m.mixing_line->second.vapor_pressure}}}};
  }
  return j.dump(2) + "\n";
}

RunManifest read_manifest(const std::filesystem::path& path) { return parse_manifest(read_text_file(path)); }

// ---------------------------------------------------------------------------
// snapshot CSV

namespace {

const std::vector<std::string>& header_for(GridKind kind) {
  static const std::vector<std::string> k2d{"particle_id", "x",        "y",        "temperature",
                                            "diameter",    "ice_flag", "pressure"};
  static const std::vector<std::string> k3d{"particle_id", "x", "y", "z", "temperature", "diameter", "ice_flag",
                                            "pressure"};
  return kind == GridKind::planar2d ? k2d : k3d;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_real(std::string_view tok, double& out) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

bool parse_int(std::string_view tok, std::int64_t& out) {
  tok = trim(tok);
  if (tok.empty()) return false;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

}  // namespace

ParticleSnapshot parse_snapshot_csv(const std::string& text, double time, GridKind kind, std::size_t* dropped) {
  const auto& expected = header_for(kind);
  const std::size_t ncol = expected.size();
  ParticleSnapshot s;
  s.time = time;
  s.dim = kind == GridKind::planar2d ? 2 : 3;
  std::size_t nonfinite = 0;

  std::string_view rest(text);
  auto next_line = [&](std::string_view& line) {
    if (rest.empty()) return false;
    const auto nl = rest.find('\n');
    line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw Error(ErrorKind::SchemaError, "header");
  {
    std::vector<std::string> got;
    std::size_t start = 0;
    const std::string_view h = trim(line);
    while (true) {
      const auto comma = h.find(',', start);
      got.emplace_back(trim(h.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    for (std::size_t c = 0; c < ncol; ++c) {
      if (c >= got.size() || got[c] != expected[c]) throw Error(ErrorKind::SchemaError, expected[c]);
    }
    if (got.size() != ncol) throw Error(ErrorKind::SchemaError, got[ncol]);
  }

  s.reserve(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')));
  std::vector<std::string_view> cells(ncol);
  std::unordered_set<std::int64_t> seen;
  seen.reserve(s.particle_id.capacity());
  while (next_line(line)) {
    if (trim(line).empty()) continue;
    std::size_t start = 0;
    for (std::size_t c = 0; c < ncol; ++c) {
      const auto comma = line.find(',', start);
      if ((comma == std::string_view::npos) != (c + 1 == ncol))
        throw Error(ErrorKind::SchemaError, c + 1 == ncol ? std::string("extra column") : expected[c + 1]);
      cells[c] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      start = comma + 1;
    }
    std::int64_t id = 0;
    if (!parse_int(cells[0], id)) throw Error(ErrorKind::SchemaError, "particle_id");
    double v[8];
    bool finite = true;
    for (std::size_t c = 1; c < ncol; ++c) {
      if (!parse_real(cells[c], v[c])) throw Error(ErrorKind::SchemaError, expected[c]);
      if (!std::isfinite(v[c])) finite = false;
    }
    if (!finite) {
      ++nonfinite;
      continue;
    }
    const std::size_t off = kind == GridKind::planar2d ? 0 : 1;
    const double temp = v[3 + off], diam = v[4 + off], ice = v[5 + off], pres = v[6 + off];
    if (!(diam > 0)) throw Error(ErrorKind::SchemaError, "diameter");
    if (!(temp > 0)) throw Error(ErrorKind::SchemaError, "temperature");
    if (!(pres > 0)) throw Error(ErrorKind::SchemaError, "pressure");
    if (ice != 0.0 && ice != 1.0) throw Error(ErrorKind::SchemaError, "ice_flag");
    if (!seen.insert(id).second) throw Error(ErrorKind::SchemaError, "particle_id");
    s.push_row(id, v[1], v[2], off ? std::optional<double>(v[3]) : std::nullopt, temp, diam, ice == 1.0, pres);
  }
  if (dropped) *dropped = nonfinite;
  return s;
}

std::string snapshot_to_csv(const ParticleSnapshot& s) {
  std::string out;
  out.reserve(s.size() * 96 + 64);
  const auto& header = header_for(s.dim == 3 ? GridKind::volumetric3d : GridKind::planar2d);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += std::to_string(s.particle_id[i]);
    out += ',';
    append_double(out, s.x[i]);
    out += ',';
    append_double(out, s.y[i]);
    if (s.dim == 3) {
      out += ',';
      append_double(out, s.z[i]);
    }
    out += ',';
    append_double(out, s.temperature[i]);
    out += ',';
    append_double(out, s.diameter[i]);
    out += s.ice_flag[i] ? ",1," : ",0,";
    append_double(out, s.pressure[i]);
    out += '\n';
  }
  return out;
}

SimulationRun load_run(const std::filesystem::path& manifest_path, const std::filesystem::path& snapshot_dir) {
  SimulationRun run;
  run.manifest = read_manifest(manifest_path);
  for (const double t : run.manifest.timesteps) {
    const auto path = snapshot_dir / (format_time(t) + ".csv");
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::MissingSnapshot, format_time(t));
    std::size_t dropped = 0;
    run.snapshots.push_back(parse_snapshot_csv(read_text_file(path), t, run.manifest.grid_kind, &dropped));
    run.diagnostics.dropped_nonfinite[t] = dropped;
  }
  // timesteps are validated strictly increasing, so snapshots are already in time order
  return run;
}

SimulationRun load_run_dir(const std::filesystem::path& run_dir) {
  return load_run(run_dir / "manifest.json", run_dir / "snapshots");
}

void write_run(const SimulationRun& run, const std::filesystem::path& run_dir) {
  std::filesystem::create_directories(run_dir / "snapshots");
  write_text_file(run_dir / "manifest.json", manifest_to_json(run.manifest));
  for (const auto& s : run.snapshots) {
    write_text_file(run_dir / "snapshots" / (format_time(s.time) + ".csv"), snapshot_to_csv(s));
  }
}

// ---------------------------------------------------------------------------
// 2D -> 3D

Position3 rotate_about_jet_axis(double x, double y, double theta) {
  const double r = std::abs(y);
  return {x, r * std::cos(theta), r * std::sin(theta)};
}

ParticleSnapshot reconstruct_3d(const ParticleSnapshot& snapshot_2d, std::size_t replication_count,
                                std::uint64_t rng_seed) {
  if (snapshot_2d.dim != 2) throw Error(ErrorKind::DimensionError, "snapshot is already 3D");
  if (replication_count == 0) throw Error(ErrorKind::InvalidArgument, "replication_count must be positive");
  std::mt19937_64 rng(rng_seed);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

  ParticleSnapshot out;
  out.time = snapshot_2d.time;
  out.dim = 3;
  out.reserve(snapshot_2d.size() * replication_count);
  const auto rc = static_cast<std::int64_t>(replication_count);
  for (std::size_t i = 0; i < snapshot_2d.size(); ++i) {
    for (std::int64_t k = 0; k < rc; ++k) {
      const double theta = static_cast<double>(rng() >> 11) * kInv53 * kTwoPi;
      const Position3 p = rotate_about_jet_axis(snapshot_2d.x[i], snapshot_2d.y[i], theta);
      out.push_row(snapshot_2d.particle_id[i] * rc + k, p.x, p.y, p.z,
                   snapshot_2d.temperature[i], snapshot_2d.diameter[i], snapshot_2d.ice_flag[i] != 0,
                   snapshot_2d.pressure[i]);
    }
  }
  return out;
}

ReplicaId decode_replica_id(std::int64_t id, std::size_t replication_count) {
  const auto rc = static_cast<std::int64_t>(replication_count);
  return {id / rc, static_cast<std::size_t>(id % rc)};
}

// ---------------------------------------------------------------------------

Ensemble validate_ensemble(std::vector<SimulationRun> runs) {
  if (runs.empty()) throw Error(ErrorKind::EmptyEnsemble, "no runs");
  Ensemble ens;
  std::set<std::string> ids;
  for (const auto& run : runs) {
    if (!ids.insert(run.manifest.run_id).second) throw Error(ErrorKind::DuplicateRunId, run.manifest.run_id);
  }
  for (const auto& run : runs) {
    for (const auto& [k, v] : run.manifest.all_parameters()) ens.parameter_schema.categorical[k].insert(v);
    RunQuality q;
    q.run_id = run.manifest.run_id;
    q.nonfinite_rows = run.diagnostics.total_dropped();
    for (const auto& s : run.snapshots)
      for (const double d : s.diameter)
        if (d > kMaxPlausibleDiameter) ++q.out_of_range_diameters;
    ens.quality.push_back(q);
  }
  ens.runs = std::move(runs);
  return ens;
}

}  // namespace contrail
