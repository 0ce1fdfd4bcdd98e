// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>

#include "contrail/artifacts.hpp"
#include "contrail/attributes.hpp"
#include "contrail/error.hpp"
#include "contrail/grouping.hpp"
#include "contrail/ingest.hpp"
#include "contrail/io.hpp"
#include "contrail/pipeline.hpp"
#include "contrail/service.hpp"
#include "contrail/shape.hpp"
#include "contrail/synth.hpp"
#include "contrail/thermo.hpp"
#include "contrail/tracking.hpp"
#include "contrail/volume.hpp"

namespace contrail::cli {

namespace fs = std::filesystem;
using artifacts::Json;

namespace {

constexpr const char* kDefaultArtifactDir = "artifacts";

const ParticleSnapshot& snapshot_at(const SimulationRun& run, const std::optional<std::string>& t) {
  if (!t) return run.snapshots.back();
  for (const auto& s : run.snapshots)
    if (format_time(s.time) == *t) return s;
  double v = 0.0;
  try {
    v = std::stod(*t);
  } catch (const std::exception&) {
    throw Error(ErrorKind::NotFound, "no timestep " + *t);
  }
  for (const auto& s : run.snapshots)
    if (s.time == v) return s;
  throw Error(ErrorKind::NotFound, "no timestep " + *t);
}

SimulationRun load(const std::string& dir) {
  auto run = load_run_dir(dir);
  if (run.snapshots.empty()) throw Error(ErrorKind::MissingSnapshot, "run has no snapshots");
  return run;
}

std::string svg(const ParticleSnapshot& s, const shape::ContrailShape& sh) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (auto i : s.ice_indices()) {
    x0 = std::min(x0, s.x[i]);
    x1 = std::max(x1, s.x[i]);
    y0 = std::min(y0, s.y[i]);
    y1 = std::max(y1, s.y[i]);
  }
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + format_double(x0) + " " +
                    format_double(-y1) + " " + format_double(x1 - x0) + " " + format_double(y1 - y0) + "\">\n";
  for (auto i : s.ice_indices())
    out += "<circle cx=\"" + format_double(s.x[i]) + "\" cy=\"" + format_double(-s.y[i]) + "\" r=\"0.2\" fill=\"#888\"/>\n";
  out += "<polygon fill=\"none\" stroke=\"#c00\" stroke-width=\"0.5\" points=\"";
  for (const auto& p : sh.shape.boundary) out += format_double(p.x) + "," + format_double(-p.y) + " ";
  out += "\"/>\n</svg>\n";
  return out;
}

struct Args {
  // generate
  std::string out_dir;
  std::uint64_t seed = 7;
  std::string synth_config;
  std::string preset = "default";
  std::size_t particles = 20000;
  // preprocess
  std::string ensemble;
  std::string config;
  std::optional<double> alpha;
  std::optional<std::size_t> k, min_pts, replication, knn_k, threads;
  std::optional<std::uint64_t> pipeline_seed;
  std::vector<std::size_t> grid_dims;
  std::optional<double> kernel_sigma;
  std::string volume_timesteps;
  // per-run tools
  std::string run_dir;
  std::optional<std::string> time;
  std::optional<double> eps;
  std::string svg_path;
  std::string attr = "temperature";
  std::string grid_out;
  // criterion
  std::string input;
  std::optional<double> exhaust_t, exhaust_pv, ambient_t, ambient_pv;
  int samples = 512;
  // similar / serve
  std::string bundle;
  std::string id;
  std::string mode = "parameters";
  std::string bind = "127.0.0.1:8080";
};

fs::path bundle_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  return pipeline::artifact_root(kDefaultArtifactDir);
}

pipeline::PipelineConfig pipeline_config(const Args& a) {
  pipeline::PipelineConfig c = a.config.empty() ? pipeline::PipelineConfig{} : pipeline::config_from_json(read_text_file(a.config));
  if (a.alpha) c.alpha = *a.alpha;
  if (a.k) c.k = *a.k;
  if (a.min_pts) c.min_pts = *a.min_pts;
  if (a.replication) c.replication = *a.replication;
  if (a.knn_k) c.knn_k = *a.knn_k;
  if (a.threads) c.threads = static_cast<unsigned>(*a.threads);
  if (a.pipeline_seed) c.seed = *a.pipeline_seed;
  if (!a.grid_dims.empty()) c.grid_dims = {a.grid_dims[0], a.grid_dims[1], a.grid_dims[2]};
  if (a.kernel_sigma) c.kernel_sigma = *a.kernel_sigma;
  if (!a.volume_timesteps.empty()) c.volume_all_timesteps = a.volume_timesteps == "all";
  return c;
}

thermo::MixingLine mixing_line(const Args& a) {
  if (!a.input.empty()) return artifacts::mixing_line_from_json(Json::parse(read_text_file(a.input)));
  if (!a.exhaust_t || !a.exhaust_pv || !a.ambient_t || !a.ambient_pv)
    throw Error(ErrorKind::InvalidArgument, "criterion needs --input or all of --exhaust-t/--exhaust-pv/--ambient-t/--ambient-pv");
  return {StatePoint{*a.exhaust_t, *a.exhaust_pv}, StatePoint{*a.ambient_t, *a.ambient_pv}};
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contrail ensemble preprocessing, analysis and service", "contrail"};
  app.require_subcommand(1);
  Args a;

  auto* gen = app.add_subcommand("generate", "Write a synthetic ensemble with ground truth");
  gen->add_option("--out", a.out_dir, "Output ensemble directory")->required();
  gen->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  gen->add_option("--config", a.synth_config, "Synthetic config JSON (overrides --preset)")->check(CLI::ExistingFile);
  gen->add_option("--preset", a.preset, "default (29 runs) or small (5 runs)")
      ->check(CLI::IsMember({"default", "small"}))
      ->capture_default_str();
  gen->add_option("--particles", a.particles, "Particles per timestep")->check(CLI::Range(100, 10000000))->capture_default_str();

  auto* pre = app.add_subcommand("preprocess", "Run the full pipeline into an artifact bundle");
  pre->add_option("--ensemble", a.ensemble, "Ensemble directory")->required()->check(CLI::ExistingDirectory);
  pre->add_option("--out", a.out_dir, "Bundle directory (default: $CONTRAIL_ARTIFACT_ROOT or ./artifacts)");
  pre->add_option("--config", a.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  pre->add_option("--alpha", a.alpha, "Alpha-shape parameter (default automatic)")->check(CLI::PositiveNumber);
  pre->add_option("--k", a.k, "Neighbour rank for the eps curve")->check(CLI::PositiveNumber);
  pre->add_option("--min-pts", a.min_pts, "DBSCAN min_pts")->check(CLI::PositiveNumber);
  pre->add_option("--replication", a.replication, "Replicas per particle for 3D reconstruction")->check(CLI::PositiveNumber);
  pre->add_option("--grid-dims", a.grid_dims, "Volume grid size nx ny nz")->expected(3)->check(CLI::Range(2, 4096));
  pre->add_option("--kernel-sigma", a.kernel_sigma, "Splat kernel sigma in m (default: clustering eps)")
      ->check(CLI::PositiveNumber);
  pre->add_option("--knn-k", a.knn_k, "Neighbours per member")->check(CLI::PositiveNumber);
  pre->add_option("--seed", a.pipeline_seed, "Seed for 3D reconstruction");
  pre->add_option("--threads", a.threads, "Runs processed concurrently (0: all cores)");
  pre->add_option("--volume-timesteps", a.volume_timesteps, "final or all")->check(CLI::IsMember({"final", "all"}));

  auto* crit = app.add_subcommand("criterion", "Classify a mixing line against the saturation curves");
  crit->add_option("--input", a.input, "JSON {exhaust: {T, P_v}, ambient: {T, P_v}}")->check(CLI::ExistingFile);
  crit->add_option("--exhaust-t", a.exhaust_t, "Exhaust temperature (K)");
  crit->add_option("--exhaust-pv", a.exhaust_pv, "Exhaust vapour pressure (Pa)");
  crit->add_option("--ambient-t", a.ambient_t, "Ambient temperature (K)");
  crit->add_option("--ambient-pv", a.ambient_pv, "Ambient vapour pressure (Pa)");
  crit->add_option("--samples", a.samples, "Mixing-line samples")->check(CLI::Range(2, 1000000))->capture_default_str();

  auto add_run = [&](CLI::App* sub) { sub->add_option("--run", a.run_dir, "Run directory")->required()->check(CLI::ExistingDirectory); };
  auto add_time = [&](CLI::App* sub) { sub->add_option("--time", a.time, "Timestep label (default: all, or final)"); };

  auto* sum = app.add_subcommand("summarize", "Per-timestep contrail characteristics of one run");
  add_run(sum);

  auto* shp = app.add_subcommand("shape", "Alpha-shape boundary and shape characteristics");
  add_run(shp);
  add_time(shp);
  shp->add_option("--alpha", a.alpha, "Alpha-shape parameter (default automatic)")->check(CLI::PositiveNumber);
  shp->add_option("--dump-svg", a.svg_path, "Also write the boundary over the ice particles as SVG (single timestep)");

  auto* grp = app.add_subcommand("groups", "Cluster ice particles per timestep");
  add_run(grp);
  add_time(grp);
  grp->add_option("--k", a.k, "Neighbour rank for the eps curve")->check(CLI::PositiveNumber);
  grp->add_option("--min-pts", a.min_pts, "DBSCAN min_pts")->check(CLI::PositiveNumber);
  grp->add_option("--eps", a.eps, "Fixed eps instead of the knee")->check(CLI::PositiveNumber);

  auto* trk = app.add_subcommand("track", "Tracking graph with events and layout");
  add_run(trk);
  trk->add_option("--k", a.k, "Neighbour rank for the eps curve")->check(CLI::PositiveNumber);
  trk->add_option("--min-pts", a.min_pts, "DBSCAN min_pts")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("similar", "Nearest members from a bundle's neighbour index");
  sim->add_option("--id", a.id, "Run id")->required();
  sim->add_option("--mode", a.mode, "parameters, shape or hausdorff")
      ->check(CLI::IsMember({"parameters", "shape", "hausdorff"}))
      ->capture_default_str();
  sim->add_option("--bundle", a.bundle, "Bundle directory (default: $CONTRAIL_ARTIFACT_ROOT or ./artifacts)");

  auto* ras = app.add_subcommand("rasterize", "Splat one timestep into a density grid file");
  add_run(ras);
  add_time(ras);
  ras->add_option("--attr", a.attr, "temperature, diameter, ice_label or group")
      ->check(CLI::IsMember({"temperature", "diameter", "ice_label", "group"}))
      ->capture_default_str();
  ras->add_option("--grid-dims", a.grid_dims, "Grid size nx ny nz")->expected(3)->check(CLI::Range(2, 4096));
  ras->add_option("--kernel-sigma", a.kernel_sigma, "Kernel sigma in m (default: clustering eps)")->check(CLI::PositiveNumber);
  ras->add_option("--replication", a.replication, "Replicas per particle for planar runs")->check(CLI::PositiveNumber);
  ras->add_option("--out", a.grid_out, "Grid file")->required();

  auto* srv = app.add_subcommand("serve", "Serve a bundle over HTTP under /api/v1");
  srv->add_option("--bundle", a.bundle, "Bundle directory (default: $CONTRAIL_ARTIFACT_ROOT or ./artifacts)");
  srv->add_option("--bind", a.bind, "host:port")->capture_default_str();

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  const auto print = [&](const Json& j) { out << artifacts::dump(j); };
  try {
    if (*gen) {
      synth::SynthConfig cfg;
      if (!a.synth_config.empty())
        cfg = synth::config_from_json(read_text_file(a.synth_config));
      else if (a.preset == "small")
        cfg = synth::small_config(a.seed, 3, 2, a.particles);
      else
        cfg = synth::default_config(a.seed, a.particles);
      const auto s = synth::generate_synthetic(cfg, a.out_dir);
      print(Json{{"seed", cfg.seed},
                 {"out", a.out_dir},
                 {"runs", s.runs},
                 {"snapshots", s.snapshots},
                 {"particles", s.particles},
                 {"ground_truth", (fs::path(a.out_dir) / "ground_truth.json").string()}});
    } else if (*pre) {
      const auto out_dir = bundle_dir(a.out_dir);
      const auto t0 = std::chrono::steady_clock::now();
      const auto b = pipeline::run_pipeline(a.ensemble, out_dir, pipeline_config(a));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      Json failed = Json::array();
      for (const auto& r : b.runs)
        if (!r.ok) failed.push_back({{"run_id", r.run_id}, {"kind", r.error_kind}, {"detail", r.error}});
      print(Json{{"bundle", out_dir.string()},
                 {"runs", b.runs.size()},
                 {"failed", failed},
                 {"artifacts", b.checksums.size()},
                 {"seconds", secs}});
      if (b.failed() == b.runs.size()) return 1;
    } else if (*crit) {
      const auto line = mixing_line(a);
      const thermo::SaturationModel model;
      print(artifacts::criterion_json(line, thermo::classify_mixing_line(model, line, a.samples),
                                      thermo::sample_curves(model, line)));
    } else if (*sum) {
      const auto run = load(a.run_dir);
      std::vector<attributes::ContrailSummary> s;
      for (const auto& snap : run.snapshots) s.push_back(attributes::summarize_timestep(snap));
      print(artifacts::summaries_json(s));
    } else if (*shp) {
      const auto run = load(a.run_dir);
      shape::ShapeOptions opts;
      opts.alpha = a.alpha;
      if (a.time || !a.svg_path.empty()) {
        const auto& snap = snapshot_at(run, a.time);
        const auto sh = shape::extract_shape(snap, opts);
        if (!a.svg_path.empty()) write_text_file(a.svg_path, svg(snap, sh));
        print(artifacts::shape_json(sh));
      } else {
        Json arr = Json::array();
        for (const auto& snap : run.snapshots) {
          try {
            arr.push_back(artifacts::shape_json(shape::extract_shape(snap, opts)));
          } catch (const Error& e) {
            arr.push_back(artifacts::shape_error_json(snap.time, e.what()));
          }
        }
        print(arr);
      }
    } else if (*grp) {
      const auto run = load(a.run_dir);
      grouping::GroupingOptions opts;
      if (a.k) opts.k = *a.k;
      if (a.min_pts) opts.min_pts = *a.min_pts;
      opts.eps = a.eps;
      if (a.time) {
        print(artifacts::groups_json(grouping::group_timestep(snapshot_at(run, a.time), opts)));
      } else {
        std::vector<grouping::GroupAssignment> all;
        for (const auto& snap : run.snapshots) all.push_back(grouping::group_timestep(snap, opts));
        print(artifacts::groups_json(all));
      }
    } else if (*trk) {
      const auto run = load(a.run_dir);
      grouping::GroupingOptions opts;
      if (a.k) opts.k = *a.k;
      if (a.min_pts) opts.min_pts = *a.min_pts;
      std::vector<grouping::GroupAssignment> all;
      for (const auto& snap : run.snapshots) all.push_back(grouping::group_timestep(snap, opts));
      print(artifacts::tracking_json(tracking::build_tracking_graph(all)));
    } else if (*sim) {
      service::Service svc(bundle_dir(a.bundle));
      service::Request req;
      req.path = "/ensemble/similar/" + a.id;
      req.query["mode"] = a.mode;
      const auto r = svc.handle(req);
      if (r.status != 200) {
        const auto j = Json::parse(r.body);
        throw Error(ErrorKind::NotFound, j["error"]["detail"].get<std::string>());
      }
      out << r.body;
    } else if (*ras) {
      const auto run = load(a.run_dir);
      const auto& snap = snapshot_at(run, a.time);
      const auto groups = grouping::group_timestep(snap);
      const std::size_t rep = a.replication.value_or(8);
      const bool planar = snap.dim == 2;
      const auto cloud = planar ? reconstruct_3d(snap, rep, a.seed) : snap;
      grouping::GroupAssignment assignment = groups;
      if (planar) {
        assignment.ice_ids.clear();
        assignment.labels.clear();
        for (std::size_t i = 0; i < groups.ice_ids.size(); ++i)
          for (std::size_t k = 0; k < rep; ++k) {
            assignment.ice_ids.push_back(groups.ice_ids[i] * static_cast<std::int64_t>(rep) + static_cast<std::int64_t>(k));
            assignment.labels.push_back(groups.labels[i]);
          }
      }
      volume::RasterOptions ropts;
      if (!a.grid_dims.empty()) ropts.dims = {a.grid_dims[0], a.grid_dims[1], a.grid_dims[2]};
      ropts.kernel_sigma = a.kernel_sigma ? *a.kernel_sigma : (groups.eps > 0 ? groups.eps : 1.0);
      ropts.groups = &assignment;
      const auto grid = volume::rasterize(cloud, volume::attribute_from_string(a.attr), ropts);
      volume::export_grid(grid, a.grid_out);
      out << volume::grid_header_json(grid) << "\n";
    } else if (*srv) {
      const auto colon = a.bind.rfind(':');
      if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--bind expects host:port");
      int port = 0;
      try {
        port = std::stoi(a.bind.substr(colon + 1));
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "bad port in --bind " + a.bind);
      }
      const auto root = bundle_dir(a.bundle);
      err << Json{{"serving", root.string()}, {"bind", a.bind}, {"prefix", service::kApiPrefix}}.dump() << std::endl;
      service::serve(root, a.bind.substr(0, colon), port);
    }
  } catch (const Error& e) {
    err << Json{{"error", {{"kind", to_string(e.kind())}, {"detail", e.detail()}}}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << Json{{"error", {{"kind", "InternalError"}, {"detail", e.what()}}}}.dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace contrail::cli
