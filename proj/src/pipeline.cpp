// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <set>
#include <thread>

#include "contrail/attributes.hpp"
#include "contrail/error.hpp"
#include "contrail/grouping.hpp"
#include "contrail/io.hpp"
#include "contrail/shape.hpp"
#include "contrail/similarity.hpp"
#include "contrail/thermo.hpp"
#include "contrail/tracking.hpp"

namespace contrail::pipeline {

namespace fs = std::filesystem;
using artifacts::Json;

std::size_t BundleSummary::failed() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunStatus& r) { return !r.ok; }));
}

fs::path artifact_root(const fs::path& fallback) {
  if (const char* env = std::getenv("CONTRAIL_ARTIFACT_ROOT"); env && *env) return fs::path(env);
  return fallback;
}

// ---------------------------------------------------------------------------
// config

Json config_json(const PipelineConfig& c) {
  Json attrs = Json::array();
  for (auto a : c.volume_attributes) attrs.push_back(volume::to_string(a));
  return Json{{"alpha", c.alpha ? Json(*c.alpha) : Json("auto")},
              {"k", c.k},
              {"min_pts", c.min_pts},
              {"replication", c.replication},
              {"grid_dims", c.grid_dims},
              {"kernel_sigma", c.kernel_sigma ? Json(*c.kernel_sigma) : Json("auto")},
              {"knn_k", c.knn_k},
              {"seed", c.seed},
              {"volume_attributes", attrs},
              {"volume_timesteps", c.volume_all_timesteps ? "all" : "final"}};
}

PipelineConfig config_from_json(const std::string& text) {
  PipelineConfig c;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  auto positive_or_auto = [](const Json& v, const char* key) -> std::optional<double> {
    if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
    if (!v.is_number() || !(v.get<double>() > 0)) throw Error(ErrorKind::ConfigError, std::string(key) + " must be auto or positive");
    return v.get<double>();
  };
  auto count = [](const Json& v, const char* key, std::size_t min) {
    if (!v.is_number_unsigned() || v.get<std::size_t>() < min)
      throw Error(ErrorKind::ConfigError, std::string(key) + " must be an integer >= " + std::to_string(min));
    return v.get<std::size_t>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "alpha") {
      c.alpha = positive_or_auto(v, "alpha");
    } else if (key == "kernel_sigma") {
      c.kernel_sigma = positive_or_auto(v, "kernel_sigma");
    } else if (key == "k") {
      c.k = count(v, "k", 1);
    } else if (key == "min_pts") {
      c.min_pts = count(v, "min_pts", 1);
    } else if (key == "replication") {
      c.replication = count(v, "replication", 1);
    } else if (key == "knn_k") {
      c.knn_k = count(v, "knn_k", 1);
    } else if (key == "seed") {
      c.seed = count(v, "seed", 0);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(count(v, "threads", 0));
    } else if (key == "grid_dims") {
      if (!v.is_array() || v.size() != 3) throw Error(ErrorKind::ConfigError, "grid_dims must hold three sizes");
      for (std::size_t i = 0; i < 3; ++i) c.grid_dims[i] = count(v[i], "grid_dims", 2);
    } else if (key == "volume_attributes") {
      if (!v.is_array()) throw Error(ErrorKind::ConfigError, "volume_attributes must be an array");
      c.volume_attributes.clear();
      for (const auto& a : v) {
        try {
          c.volume_attributes.push_back(volume::attribute_from_string(a.get<std::string>()));
        } catch (const std::exception& e) {
          throw Error(ErrorKind::ConfigError, std::string("volume_attributes: ") + e.what());
        }
      }
    } else if (key == "volume_timesteps") {
      const auto s = v.is_string() ? v.get<std::string>() : std::string();
      if (s != "final" && s != "all") throw Error(ErrorKind::ConfigError, "volume_timesteps must be final or all");
      c.volume_all_timesteps = s == "all";
    } else {
      throw Error(ErrorKind::ConfigError, "unknown config key " + key);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// ensemble-level artifacts

artifacts::GlyphDiff compute_glyph_diff(const Ensemble& ensemble) {
  artifacts::GlyphDiff d;
  std::map<std::string, std::set<std::string>> observed;
  for (const auto& run : ensemble.runs)
    for (const auto& [k, v] : run.manifest.all_parameters()) observed[k].insert(v);
  for (const auto& [k, values] : observed)
    if (values.size() > 1) d.diff_attributes.push_back(k);
  // a parameter missing from some runs differs too
  for (const auto& [k, values] : observed) {
    if (values.size() > 1) continue;
    for (const auto& run : ensemble.runs)
      if (!run.manifest.all_parameters().count(k)) {
        d.diff_attributes.push_back(k);
        break;
      }
  }
  std::sort(d.diff_attributes.begin(), d.diff_attributes.end());

  std::map<std::map<std::string, std::string>, std::size_t> index;
  for (const auto& run : ensemble.runs) {
    const auto params = run.manifest.all_parameters();
    auto [it, inserted] = index.try_emplace(params, d.groups.size());
    if (inserted) {
      artifacts::GlyphGroup g;
      for (const auto& a : d.diff_attributes) {
        const auto p = params.find(a);
        if (p != params.end()) g.values[a] = p->second;
      }
      d.groups.push_back(std::move(g));
    }
    d.groups[it->second].run_ids.push_back(run.manifest.run_id);
  }
  for (auto& g : d.groups) std::sort(g.run_ids.begin(), g.run_ids.end());
  std::sort(d.groups.begin(), d.groups.end(), [](const auto& a, const auto& b) {
    if (a.run_ids.size() != b.run_ids.size()) return a.run_ids.size() > b.run_ids.size();
    return a.run_ids < b.run_ids;
  });
  return d;
}

std::vector<artifacts::FilamentPoint> filament_series(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw Error(ErrorKind::InvalidArgument, "filament series length mismatch");
  std::vector<artifacts::FilamentPoint> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double change = 0.0;
    if (i > 0) change = (values[i] - values[i - 1]) / std::max(std::abs(values[i - 1]), kRelativeChangeGuard);
    out.push_back({times[i], values[i], change});
  }
  return out;
}

double summary_value(const attributes::ContrailSummary& s, const std::string& attribute) {
  if (attribute == "mean_temperature") return s.mean_temperature;
  if (attribute == "ice_count") return static_cast<double>(s.ice_count);
  if (attribute == "total_mass") return s.total_mass;
  if (attribute == "length") return s.length;
  if (attribute == "mean_temperature_all") return s.mean_temperature_all;
  throw Error(ErrorKind::NotFound, "unknown summary attribute " + attribute);
}

artifacts::FilamentSet compute_filaments(const std::map<std::string, std::vector<attributes::ContrailSummary>>& summaries,
                                         const std::vector<std::string>& attrs) {
  artifacts::FilamentSet out;
  for (const auto& attr : attrs) {
    auto& per_run = out[attr];
    for (const auto& [id, series] : summaries) {
      std::vector<double> t, v;
      for (const auto& s : series) {
        t.push_back(s.time);
        v.push_back(summary_value(s, attr));
      }
      per_run[id] = filament_series(t, v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// per-run stage

namespace {

struct RunResult {
  RunStatus status;
  std::string dir_name;
  RunManifest manifest;
  std::vector<attributes::ContrailSummary> summaries;
  std::optional<similarity::ShapeFeatureVector> shape_features;
  PointSet final_boundary;
  RunQuality quality;
  Json artifacts;  // relative paths
};

grouping::GroupAssignment replicate_assignment(const grouping::GroupAssignment& a, std::size_t r) {
  grouping::GroupAssignment out = a;
  out.ice_ids.clear();
  out.labels.clear();
  for (std::size_t i = 0; i < a.ice_ids.size(); ++i)
    for (std::size_t k = 0; k < r; ++k) {
      out.ice_ids.push_back(a.ice_ids[i] * static_cast<std::int64_t>(r) + static_cast<std::int64_t>(k));
      out.labels.push_back(a.labels[i]);
    }
  for (auto& g : out.groups) {
    std::vector<std::int64_t> ids;
    for (auto id : g.particle_ids)
      for (std::size_t k = 0; k < r; ++k) ids.push_back(id * static_cast<std::int64_t>(r) + static_cast<std::int64_t>(k));
    g.particle_ids = std::move(ids);
  }
  return out;
}

tracking::Box domain_of(const ParticleSnapshot& s) {
  tracking::Box b;
  const std::size_t d = s.dim == 3 ? 3 : 2;
  b.lo.assign(d, 0.0);
  b.hi.assign(d, 0.0);
  if (s.size() == 0) return b;
  const std::vector<const std::vector<double>*> cols{&s.x, &s.y, &s.z};
  for (std::size_t a = 0; a < d; ++a) {
    const auto [lo, hi] = std::minmax_element(cols[a]->begin(), cols[a]->end());
    b.lo[a] = *lo;
    b.hi[a] = *hi;
  }
  return b;
}

void write_artifact(const fs::path& stage, const std::string& rel, std::string_view bytes) {
  write_text_file(stage / rel, bytes);
}

RunResult process_run(const fs::path& run_dir, const fs::path& stage, const PipelineConfig& cfg, unsigned inner_threads) {
  RunResult r;
  SimulationRun run = load_run_dir(run_dir);
  r.manifest = run.manifest;
  r.status.run_id = run.manifest.run_id;
  r.quality.run_id = run.manifest.run_id;
  r.quality.nonfinite_rows = run.diagnostics.total_dropped();
  for (const auto& s : run.snapshots)
    for (double d : s.diameter)
      if (d > kMaxPlausibleDiameter) ++r.quality.out_of_range_diameters;
  if (run.snapshots.empty()) throw Error(ErrorKind::MissingSnapshot, "run has no snapshots");

  Json art;
  write_artifact(stage, "manifest.json", manifest_to_json(run.manifest));
  art["manifest"] = "manifest.json";

  for (const auto& s : run.snapshots) r.summaries.push_back(attributes::summarize_timestep(s));
  write_artifact(stage, "summaries.json", artifacts::dump(artifacts::summaries_json(r.summaries)));
  art["summaries"] = "summaries.json";

  Json shapes = Json::array();
  shape::ShapeOptions sopts;
  sopts.alpha = cfg.alpha;
  for (std::size_t t = 0; t < run.snapshots.size(); ++t) {
    const auto& snap = run.snapshots[t];
    try {
      const auto sh = shape::extract_shape(snap, sopts);
      shapes.push_back(artifacts::shape_json(sh));
      if (t + 1 == run.snapshots.size()) {
        const auto& c = sh.characteristics;
        const auto& sum = r.summaries.back();
        r.shape_features = similarity::ShapeFeatureVector{
            r.manifest.run_id,
            {c.area, c.length, c.height, c.slope, static_cast<double>(sum.ice_count), sum.total_mass, sum.mean_temperature}};
        r.final_boundary = PointSet::from_points(sh.shape.boundary);
      }
    } catch (const Error& e) {
      shapes.push_back(artifacts::shape_error_json(snap.time, e.what()));
    }
  }
  write_artifact(stage, "shapes.json", artifacts::dump(shapes));
  art["shapes"] = "shapes.json";

  grouping::GroupingOptions gopts;
  gopts.k = cfg.k;
  gopts.min_pts = cfg.min_pts;
  std::vector<grouping::GroupAssignment> groups;
  Json labels = Json::object();
  tracking::TrackingOptions topts;
  for (const auto& snap : run.snapshots) {
    groups.push_back(grouping::group_timestep(snap, gopts));
    const auto rel = "labels/" + format_time(snap.time) + ".csv";
    write_artifact(stage, rel, grouping::labels_to_csv(groups.back()));
    labels[format_time(snap.time)] = rel;
    topts.domains.push_back(domain_of(snap));
  }
  write_artifact(stage, "groups.json", artifacts::dump(artifacts::groups_json(groups)));
  art["groups"] = "groups.json";
  art["labels"] = labels;

  const auto graph = tracking::build_tracking_graph(groups, topts);
  write_artifact(stage, "tracking.json", artifacts::dump(artifacts::tracking_json(graph)));
  art["tracking"] = "tracking.json";

  if (run.manifest.mixing_line) {
    const thermo::SaturationModel model;
    const thermo::MixingLine line{run.manifest.mixing_line->first, run.manifest.mixing_line->second};
    const auto verdict = thermo::classify_mixing_line(model, line);
    const auto plot = thermo::sample_curves(model, line);
    write_artifact(stage, "criterion.json", artifacts::dump(artifacts::criterion_json(line, verdict, plot)));
    art["criterion"] = "criterion.json";
  }

  Json vol = Json::object();
  const std::size_t first = cfg.volume_all_timesteps ? 0 : run.snapshots.size() - 1;
  for (std::size_t t = first; t < run.snapshots.size() && !cfg.volume_attributes.empty(); ++t) {
    const auto& snap = run.snapshots[t];
    const bool planar = snap.dim == 2;
    const ParticleSnapshot cloud = planar ? reconstruct_3d(snap, cfg.replication, cfg.seed + t) : snap;
    const auto assignment = planar ? replicate_assignment(groups[t], cfg.replication) : groups[t];
    volume::RasterOptions ropts;
    ropts.dims = cfg.grid_dims;
    ropts.kernel_sigma = cfg.kernel_sigma ? *cfg.kernel_sigma : (groups[t].eps > 0 ? groups[t].eps : 1.0);
    ropts.groups = &assignment;
    ropts.threads = inner_threads;
    Json per_attr = Json::object();
    for (auto a : cfg.volume_attributes) {
      const auto grid = volume::rasterize(cloud, a, ropts);
      const auto rel = "volume/" + format_time(snap.time) + "_" + volume::to_string(a) + ".grid";
      write_artifact(stage, rel, volume::encode_grid(grid));
      per_attr[volume::to_string(a)] = rel;
    }
    vol[format_time(snap.time)] = per_attr;
  }
  art["volume"] = vol;
  r.artifacts = art;
  r.status.ok = true;
  return r;
}

std::vector<fs::path> discover_runs(const fs::path& ensemble_dir) {
  if (!fs::is_directory(ensemble_dir)) throw Error(ErrorKind::IoError, "not a directory: " + ensemble_dir.string());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(ensemble_dir))
    if (e.is_directory() && fs::exists(e.path() / "manifest.json")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw Error(ErrorKind::EmptyEnsemble, "no run directories under " + ensemble_dir.string());
  return dirs;
}

void collect_checksums(const fs::path& root, const fs::path& dir, std::map<std::string, std::string>& out) {
  if (!fs::exists(dir)) return;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = sha256_file(e.path());
}

}  // namespace

BundleSummary run_pipeline(const fs::path& ensemble_dir, const fs::path& out_dir, const PipelineConfig& cfg) {
  const auto dirs = discover_runs(ensemble_dir);

  // manifests first: duplicate ids and the parameter schema are ensemble-wide
  std::vector<std::optional<RunManifest>> manifests(dirs.size());
  std::vector<std::string> manifest_errors(dirs.size());
  std::vector<ErrorKind> manifest_kinds(dirs.size(), ErrorKind::SchemaError);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    try {
      manifests[i] = read_manifest(dirs[i] / "manifest.json");
      if (!seen.insert(manifests[i]->run_id).second) throw Error(ErrorKind::DuplicateRunId, manifests[i]->run_id);
    } catch (const Error& e) {
      manifest_kinds[i] = e.kind();
      manifest_errors[i] = e.what();
    }
  }

  fs::create_directories(out_dir);
  fs::remove_all(out_dir / "runs");
  fs::remove_all(out_dir / "ensemble");
  fs::remove(out_dir / "bundle.json");

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(cfg.threads ? cfg.threads : hw, dirs.size()));
  const unsigned inner = workers > 1 ? 1u : 0u;

  std::vector<RunResult> results(dirs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= dirs.size()) return;
      RunResult& r = results[i];
      r.dir_name = dirs[i].filename().string();
      const std::string id = manifests[i] ? manifests[i]->run_id : r.dir_name;
      r.status.run_id = id;
      if (!manifests[i]) {
        r.status.error_kind = std::string(to_string(manifest_kinds[i]));
        r.status.error = manifest_errors[i];
        continue;
      }
      const fs::path stage = out_dir / "runs" / ("." + id + ".partial");
      const fs::path final_dir = out_dir / "runs" / id;
      try {
        r = process_run(dirs[i], stage, cfg, inner);
        r.dir_name = dirs[i].filename().string();
        fs::rename(stage, final_dir);
      } catch (const Error& e) {
        r.status = {id, false, std::string(to_string(e.kind())), e.what()};
      } catch (const fs::filesystem_error& e) {
        r.status = {id, false, "IoError", e.what()};
      } catch (const std::exception& e) {
        r.status = {id, false, "InternalError", e.what()};
      }
      if (!r.status.ok) {
        std::error_code ec;
        fs::remove_all(stage, ec);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  // ensemble stage over the successful runs
  std::vector<SimulationRun> ok_runs;
  std::map<std::string, std::vector<attributes::ContrailSummary>> summaries;
  std::vector<similarity::ShapeFeatureVector> shape_vectors;
  std::vector<std::pair<std::string, PointSet>> boundaries;
  for (const auto& r : results) {
    if (!r.status.ok) continue;
    SimulationRun s;
    s.manifest = r.manifest;
    ok_runs.push_back(std::move(s));
    summaries[r.status.run_id] = r.summaries;
    if (r.shape_features) {
      shape_vectors.push_back(*r.shape_features);
      boundaries.push_back({r.status.run_id, r.final_boundary});
    }
  }

  Json ensemble_paths = Json::object();
  if (!ok_runs.empty()) {
    Ensemble ens = validate_ensemble(std::move(ok_runs));
    for (const auto& attr : kOutputAttributes) {
      NumericRange range{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      for (const auto& [id, s] : summaries) {
        const double v = summary_value(s.back(), attr);
        range.min = std::min(range.min, v);
        range.max = std::max(range.max, v);
      }
      ens.parameter_schema.numeric[attr] = range;
    }
    const fs::path edir = out_dir / "ensemble";
    write_text_file(edir / "schema.json", artifacts::dump(artifacts::schema_json(ens.parameter_schema)));
    write_text_file(edir / "glyphs.json", artifacts::dump(artifacts::glyphs_json(compute_glyph_diff(ens))));
    write_text_file(edir / "filaments.json", artifacts::dump(artifacts::filaments_json(compute_filaments(summaries))));
    ensemble_paths["schema"] = "ensemble/schema.json";
    ensemble_paths["glyphs"] = "ensemble/glyphs.json";
    ensemble_paths["filaments"] = "ensemble/filaments.json";

    Json nb = Json::object();
    auto write_index = [&](const similarity::NeighborIndex& idx) {
      const auto rel = "ensemble/neighbors_" + similarity::to_string(idx.mode) + ".json";
      write_text_file(out_dir / rel, artifacts::dump(artifacts::neighbors_json(idx)));
      nb[similarity::to_string(idx.mode)] = rel;
    };
    if (ens.runs.size() >= 2) {
      std::vector<similarity::ParameterVector> pv;
      for (const auto& run : ens.runs) {
        similarity::ParameterVector v{run.manifest.run_id, run.manifest.all_parameters(), {}};
        for (const auto& attr : kOutputAttributes) v.numerical[attr] = summary_value(summaries[run.manifest.run_id].back(), attr);
        pv.push_back(std::move(v));
      }
      write_index(similarity::knn_parameters(pv, ens.parameter_schema.numeric, std::min(cfg.knn_k, pv.size() - 1)));
    }
    if (shape_vectors.size() >= 2) {
      const std::size_t k = std::min(cfg.knn_k, shape_vectors.size() - 1);
      write_index(similarity::knn_shape(shape_vectors, k));
      write_index(similarity::knn_hausdorff(boundaries, k));
    }
    ensemble_paths["neighbors"] = nb;

    Json quality = Json::array();
    for (const auto& r : results)
      if (r.status.ok)
        quality.push_back({{"run_id", r.quality.run_id},
                           {"nonfinite_rows", r.quality.nonfinite_rows},
                           {"out_of_range_diameters", r.quality.out_of_range_diameters}});
    write_text_file(edir / "quality.json", artifacts::dump(quality));
    ensemble_paths["quality"] = "ensemble/quality.json";
  }

  BundleSummary summary;
  summary.root = out_dir;
  collect_checksums(out_dir, out_dir / "runs", summary.checksums);
  collect_checksums(out_dir, out_dir / "ensemble", summary.checksums);

  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return results[a].status.run_id < results[b].status.run_id; });
  Json runs = Json::array();
  for (auto i : order) {
    const auto& r = results[i];
    summary.runs.push_back(r.status);
    Json rj{{"run_id", r.status.run_id}, {"status", r.status.ok ? "ok" : "failed"}, {"source", r.dir_name}};
    if (r.status.ok) {
      rj["timesteps"] = r.manifest.timesteps;
      Json art = r.artifacts;
      // paths relative to the bundle root
      const std::string prefix = "runs/" + r.status.run_id + "/";
      for (auto& [key, v] : art.items()) {
        if (v.is_string()) {
          v = prefix + v.get<std::string>();
        } else {
          for (auto& [t, inner_v] : v.items()) {
            if (inner_v.is_string())
              inner_v = prefix + inner_v.get<std::string>();
            else
              for (auto& [a, p] : inner_v.items()) p = prefix + p.get<std::string>();
          }
        }
      }
      rj["artifacts"] = art;
    } else {
      rj["error"] = {{"kind", r.status.error_kind}, {"detail", r.status.error}};
    }
    runs.push_back(rj);
  }

  Json bundle{{"pipeline_version", kPipelineVersion},
              {"config", config_json(cfg)},
              {"runs", runs},
              {"ensemble", ensemble_paths},
              {"checksums", summary.checksums}};
  write_text_file(out_dir / "bundle.json", artifacts::dump(bundle));
  return summary;
}

std::vector<std::string> verify_bundle(const fs::path& root) {
  const auto bundle = Json::parse(read_text_file(root / "bundle.json"));
  std::vector<std::string> bad;
  for (const auto& [rel, sum] : bundle.at("checksums").items()) {
    const auto p = root / rel;
    if (!fs::exists(p) || sha256_file(p) != sum.get<std::string>()) bad.push_back(rel);
  }
  return bad;
}

}  // namespace contrail::pipeline
