// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "contrail/error.hpp"
#include "contrail/grouping.hpp"
#include "contrail/io.hpp"
#include "contrail/shape.hpp"
#include "contrail/synth.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace contrail;
using namespace contrail::synth;

namespace {

std::string tree_digest(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string acc;
  for (const auto& f : files) acc += std::filesystem::relative(f, root).string() + ":" + sha256_file(f) + "\n";
  return sha256_hex(acc);
}

bool has_error(ErrorKind kind, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

std::vector<std::string> event_keys(const std::vector<tracking::Event>& events) {
  std::vector<std::string> out;
  for (const auto& e : events) {
    std::string k = tracking::to_string(e.type) + "@" + format_time(e.time);
    for (const auto& n : e.node_ids) k += " " + n;
    out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("default config layout") {
  const auto cfg = default_config(7, 4000);
  REQUIRE(cfg.runs.size() == 29);
  std::size_t multi = 0, narrow = 0, wide = 0;
  std::set<std::string> hidden;
  for (const auto& r : cfg.runs) {
    CHECK(r.input_params.size() + r.boundary_conditions.size() >= 30);
    if (!r.shape_family) {
      ++multi;
      CHECK(r.timesteps == 10);
      hidden.insert(r.hidden_group);
      CHECK(r.input_params == cfg.runs[0].input_params);
    } else if (*r.shape_family == Family::narrow) {
      ++narrow;
    } else {
      ++wide;
    }
  }
  CHECK(multi == 19);
  CHECK(narrow == 5);
  CHECK(wide == 5);
  CHECK(hidden == std::set<std::string>{"cold", "warm"});
  CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("script contains the planted events") {
  const auto cfg = default_config(7, 4000);
  const auto events = expected_events(cfg.runs[0]);
  CHECK(event_keys(events) == std::vector<std::string>{
                                  "appear@2.5 c4g5",
                                  "exit@4 c7g1",
                                  "merge@2 c3g0 c2g0 c2g1",
                                  "merge@3.5 c6g2 c5g2 c5g3",
                                  "split@3 c4g4 c5g4 c5g5",
                              });
}

TEST_CASE("configured merge is echoed in the ground truth") {
  SynthConfig cfg;
  RunSpec r = default_config(7, 4000).runs[0];
  r.groups = {{"A", 300, 20.0, 20.0}, {"B", 300, -20.0, 20.0}};
  r.script = {{ScriptOp::Kind::merge, 9, {"A", "B"}, {"AB"}, 0, 0.0, 20.0}};
  cfg.runs = {r};
  CHECK(event_keys(expected_events(r)) == std::vector<std::string>{"merge@5 c9g0 c8g0 c8g1"});
  test_util::TempDir dir;
  generate_synthetic(cfg, dir.path());
  const auto truth = nlohmann::json::parse(read_text_file(dir.path() / "ground_truth.json"));
  const auto& ev = truth["events"][r.run_id];
  REQUIRE(ev.size() == 1);
  CHECK(ev[0]["type"] == "merge");
  CHECK(ev[0]["time"].get<double>() == 5.0);
  CHECK(ev[0]["node_ids"] == nlohmann::json::array({"c9g0", "c8g0", "c8g1"}));
}

TEST_CASE("config json round trip") {
  const auto cfg = default_config(11, 3000);
  const auto text = config_to_json(cfg);
  const auto back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK(has_error(ErrorKind::ConfigError, [] { config_from_json("{\"runs\": 3}"); }));
  CHECK(has_error(ErrorKind::ConfigError, [] { config_from_json("not json"); }));
}

TEST_CASE("invalid scripts are rejected") {
  auto base = small_config(3, 1, 0, 3000);
  auto& run = base.runs[0];
  using K = ScriptOp::Kind;

  auto bad = base;
  bad.runs[0].script.push_back({K::merge, 8, {"Z", "AB"}, {"X"}, 0, 0, 20});
  CHECK(has_error(ErrorKind::ConfigError, [&] { validate_config(bad); }));

  bad = base;
  bad.runs[0].script.push_back({K::exit, 9, {"G"}, {}, 0, 0, 20});
  CHECK(has_error(ErrorKind::ConfigError, [&] { validate_config(bad); }));

  bad = base;
  bad.runs[0].script.push_back({K::merge, 0, {"A", "B"}, {"Q"}, 0, 0, 20});
  CHECK(has_error(ErrorKind::ConfigError, [&] { validate_config(bad); }));

  bad = base;
  bad.runs[0].script.push_back({K::split, 3, {"A"}, {"A1", "A2"}, 0, 0, 20});  // A merges at step 3 too
  CHECK(has_error(ErrorKind::ConfigError, [&] { validate_config(bad); }));

  bad = base;
  bad.runs[0].script.push_back({K::appear, 2, {}, {"H"}, 400, 50.0, 20});  // collides with A
  CHECK(has_error(ErrorKind::ConfigError, [&] { validate_config(bad); }));

  bad = base;
  bad.runs[0].groups.push_back(run.groups[0]);
  CHECK(has_error(ErrorKind::ConfigError, [&] { validate_config(bad); }));

  bad = base;
  bad.runs.push_back(base.runs[0]);
  CHECK(has_error(ErrorKind::ConfigError, [&] { validate_config(bad); }));

  bad = base;
  bad.straggler_fraction = -0.1;
  CHECK(has_error(ErrorKind::ConfigError, [&] { validate_config(bad); }));
}

TEST_CASE("generation is deterministic and loadable") {
  const auto cfg = small_config(5, 2, 2, 3000, 10);
  test_util::TempDir a, b;
  const auto sa = generate_synthetic(cfg, a.path());
  generate_synthetic(cfg, b.path());
  CHECK(tree_digest(a.path()) == tree_digest(b.path()));
  CHECK(sa.runs == 4);
  CHECK(sa.snapshots == 22);

  std::vector<SimulationRun> runs;
  for (const auto& r : cfg.runs) {
    auto run = load_run_dir(a.path() / r.run_id);
    CHECK(run.diagnostics.total_dropped() == 0);
    CHECK(run.snapshots.size() == r.timesteps);
    runs.push_back(std::move(run));
  }
  const auto ens = validate_ensemble(std::move(runs));
  for (const auto& q : ens.quality) {
    CHECK(q.nonfinite_rows == 0);
    CHECK(q.out_of_range_diameters == 0);
  }

  auto other = cfg;
  other.seed = 6;
  test_util::TempDir c;
  generate_synthetic(other, c.path());
  CHECK(tree_digest(c.path()) != tree_digest(a.path()));

  const auto truth = nlohmann::json::parse(read_text_file(a.path() / "ground_truth.json"));
  CHECK(truth["events"].size() == 2);
  CHECK(truth["filter"]["matches"].size() == 2);
  CHECK(truth["families"]["narrow"].size() == 1);
}

TEST_CASE("planted groups and events are recovered by clustering and tracking") {
  const auto cfg = small_config(9, 1, 0, 6000, 10);
  test_util::TempDir dir;
  generate_synthetic(cfg, dir.path());
  const auto run = load_run_dir(dir.path() / cfg.runs[0].run_id);
  const auto truth = nlohmann::json::parse(read_text_file(dir.path() / "ground_truth.json"));
  const auto& planted = truth["planted_groups"][cfg.runs[0].run_id];

  std::vector<grouping::GroupAssignment> assignments;
  for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
    auto a = grouping::group_timestep(run.snapshots[s]);
    REQUIRE(a.groups.size() == planted[s]["groups"].size());
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
      const auto& pg = planted[s]["groups"][g];
      std::set<std::int64_t> expected;
      for (const auto& r : pg["id_ranges"])
        for (std::int64_t id = r[0].get<std::int64_t>(); id <= r[1].get<std::int64_t>(); ++id) expected.insert(id);
      const std::set<std::int64_t> got(a.groups[g].particle_ids.begin(), a.groups[g].particle_ids.end());
      std::vector<std::int64_t> extra, missing;
      std::set_difference(got.begin(), got.end(), expected.begin(), expected.end(), std::back_inserter(extra));
      std::set_difference(expected.begin(), expected.end(), got.begin(), got.end(), std::back_inserter(missing));
      INFO("step " << s << " group " << g << " extra " << extra.size() << " missing " << missing.size());
      // edge particles of a planted group may fall out as noise; nothing foreign may join
      CHECK(extra.empty());
      CHECK(missing.size() * 100 <= expected.size());
    }
    assignments.push_back(std::move(a));
  }
  const auto graph = tracking::build_tracking_graph(assignments);
  CHECK(graph.approximate_links.empty());
  CHECK(event_keys(graph.events) == event_keys(expected_events(cfg.runs[0])));
}

TEST_CASE("wide plumes are taller than narrow plumes") {
  const auto cfg = small_config(13, 0, 4, 6000);
  test_util::TempDir dir;
  generate_synthetic(cfg, dir.path());
  double narrow = 0.0, wide = 0.0;
  for (const auto& r : cfg.runs) {
    const auto run = load_run_dir(dir.path() / r.run_id);
    const auto s = shape::extract_shape(run.snapshots.back());
    (*r.shape_family == Family::wide ? wide : narrow) += s.characteristics.height / 2.0;
  }
  CHECK(wide / narrow >= 2.0);
}
