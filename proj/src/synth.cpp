// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "contrail/error.hpp"
#include "contrail/io.hpp"
#include "json.hpp"

namespace contrail::synth {

using nlohmann::ordered_json;

std::string to_string(Family f) { return f == Family::narrow ? "narrow" : "wide"; }

std::string to_string(ScriptOp::Kind k) {
  switch (k) {
    case ScriptOp::Kind::merge: return "merge";
    case ScriptOp::Kind::split: return "split";
    case ScriptOp::Kind::appear: return "appear";
    case ScriptOp::Kind::exit: return "exit";
  }
  return "merge";
}

namespace {

constexpr std::int64_t kStragglerIdBase = 1000000;
constexpr std::int64_t kNonIceIdBase = 2000000;
constexpr double kGroupX0 = 60.0;      // m, group centres at step 0
constexpr double kBaseCount = 2400.0;  // particles in a group of the base size
constexpr double kBaseA = 14.0;        // m, semi-axes of a base-size group
constexpr double kBaseB = 3.5;
constexpr double kSplitOffset = 10.0;  // m, lane offset of split children
constexpr double kClearance = 2.0;    // m, minimum gap between planted groups
constexpr double kExitTemperature = 300.0;  // K above ambient at the nozzle
constexpr double kDecayLength = 15.0;       // m

ScriptOp::Kind kind_from_string(const std::string& s) {
  if (s == "merge") return ScriptOp::Kind::merge;
  if (s == "split") return ScriptOp::Kind::split;
  if (s == "appear") return ScriptOp::Kind::appear;
  if (s == "exit") return ScriptOp::Kind::exit;
  throw Error(ErrorKind::ConfigError, "unknown script op " + s);
}

struct LiveGroup {
  std::string name;
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;  // inclusive id ranges
  std::size_t count = 0;
  double y = 0.0;
  double speed = 0.0;

  std::int64_t min_id() const { return ranges.front().first; }
  double a() const { return kBaseA * std::sqrt(static_cast<double>(count) / kBaseCount); }
  double b() const { return kBaseB * std::sqrt(static_cast<double>(count) / kBaseCount); }
  double x(std::size_t step) const { return kGroupX0 + speed * static_cast<double>(step); }
};

struct Simulation {
  std::vector<std::vector<LiveGroup>> steps;  // live groups per step, ordered by min id
  std::vector<tracking::Event> events;
};

std::string node_id(const std::vector<LiveGroup>& live, std::size_t step, const std::string& name) {
  for (std::size_t r = 0; r < live.size(); ++r)
    if (live[r].name == name) return "c" + std::to_string(step) + "g" + std::to_string(r);
  throw Error(ErrorKind::ConfigError, "group " + name + " not live at step " + std::to_string(step));
}

double time_of(const RunSpec& run, std::size_t step) { return run.dt * static_cast<double>(step + 1); }

Simulation simulate(const RunSpec& run) {
  auto fail = [&](const std::string& msg) { throw Error(ErrorKind::ConfigError, run.run_id + ": " + msg); };
  if (run.timesteps == 0) fail("timesteps must be positive");
  Simulation sim;
  std::int64_t next_id = 0;
  auto allocate = [&](LiveGroup& g) {
    g.ranges = {{next_id, next_id + static_cast<std::int64_t>(g.count) - 1}};
    next_id += static_cast<std::int64_t>(g.count);
  };
  std::set<std::string> names;
  auto claim = [&](const std::string& name) {
    if (name.empty()) fail("empty group name");
    if (!names.insert(name).second) fail("group name reused: " + name);
  };

  std::vector<LiveGroup> live;
  for (const auto& s : run.groups) {
    if (s.count == 0) fail("group " + s.name + " has no particles");
    claim(s.name);
    LiveGroup g{s.name, {}, s.count, s.y, s.speed};
    allocate(g);
    live.push_back(std::move(g));
  }

  for (const auto& op : run.script) {
    if (op.step >= run.timesteps) fail("op at step " + std::to_string(op.step) + " beyond the last timestep");
    if (op.kind == ScriptOp::Kind::exit) {
      if (op.step + 1 >= run.timesteps) fail("exit needs a later timestep to be absent from");
    } else if (op.step == 0) {
      fail(to_string(op.kind) + " cannot happen at the first timestep");
    }
  }

  auto find = [&](const std::string& name) -> std::vector<LiveGroup>::iterator {
    const auto it = std::find_if(live.begin(), live.end(), [&](const LiveGroup& g) { return g.name == name; });
    if (it == live.end()) fail("group " + name + " is not live");
    return it;
  };
  auto sort_live = [&] {
    std::sort(live.begin(), live.end(), [](const LiveGroup& a, const LiveGroup& b) { return a.min_id() < b.min_id(); });
  };
  sort_live();

  for (std::size_t step = 0; step < run.timesteps; ++step) {
    const std::vector<LiveGroup> before = step > 0 ? sim.steps.back() : std::vector<LiveGroup>{};
    std::set<std::string> touched;
    auto touch = [&](const std::string& name) {
      if (!touched.insert(name).second) fail("group " + name + " used by two ops at step " + std::to_string(step));
    };
    struct Pending {
      tracking::EventType type;
      std::vector<std::string> before;
      std::vector<std::string> after;
    };
    std::vector<Pending> pending;

    if (step > 0) {
      for (const auto& op : run.script) {
        if (op.kind == ScriptOp::Kind::exit && op.step + 1 == step) {
          if (op.from.size() != 1) fail("exit takes one group");
          touch(op.from[0]);
          live.erase(find(op.from[0]));
        }
      }
      for (const auto& op : run.script) {
        if (op.step != step || op.kind == ScriptOp::Kind::exit) continue;
        switch (op.kind) {
          case ScriptOp::Kind::merge: {
            if (op.from.size() < 2 || op.to.size() != 1) fail("merge takes two or more groups into one");
            LiveGroup child{op.to[0], {}, 0, 0.0, 0.0};
            for (const auto& p : op.from) {
              touch(p);
              const auto it = find(p);
              child.ranges.insert(child.ranges.end(), it->ranges.begin(), it->ranges.end());
              child.count += it->count;
              child.y += it->y / static_cast<double>(op.from.size());
              child.speed += it->speed / static_cast<double>(op.from.size());
              live.erase(it);
            }
            std::sort(child.ranges.begin(), child.ranges.end());
            claim(child.name);
            live.push_back(std::move(child));
            pending.push_back({tracking::EventType::merge, op.from, op.to});
            break;
          }
          case ScriptOp::Kind::split: {
            if (op.from.size() != 1 || op.to.size() < 2) fail("split takes one group into two or more");
            touch(op.from[0]);
            const auto it = find(op.from[0]);
            const LiveGroup parent = *it;
            live.erase(it);
            if (parent.count < op.to.size()) fail("split of " + parent.name + " has too few particles");
            std::vector<std::int64_t> ids;
            for (const auto& [lo, hi] : parent.ranges)
              for (std::int64_t id = lo; id <= hi; ++id) ids.push_back(id);
            const std::size_t parts = op.to.size();
            for (std::size_t c = 0; c < parts; ++c) {
              LiveGroup child{op.to[c], {}, 0, 0.0, parent.speed};
              const std::size_t b = ids.size() * c / parts, e = ids.size() * (c + 1) / parts;
              for (std::size_t i = b; i < e; ++i) {
                if (!child.ranges.empty() && child.ranges.back().second + 1 == ids[i])
                  child.ranges.back().second = ids[i];
                else
                  child.ranges.push_back({ids[i], ids[i]});
              }
              child.count = e - b;
              child.y = parent.y + kSplitOffset * (static_cast<double>(c) - 0.5 * static_cast<double>(parts - 1));
              claim(child.name);
              live.push_back(std::move(child));
            }
            pending.push_back({tracking::EventType::split, op.from, op.to});
            break;
          }
          case ScriptOp::Kind::appear: {
            if (op.to.size() != 1 || op.count == 0) fail("appear takes one named group with a particle count");
            claim(op.to[0]);
            touch(op.to[0]);
            LiveGroup g{op.to[0], {}, op.count, op.y, op.speed};
            allocate(g);
            live.push_back(std::move(g));
            pending.push_back({tracking::EventType::appear, {}, op.to});
            break;
          }
          default: break;
        }
      }
      sort_live();
    }

    // planted groups must stay clear of each other
    for (std::size_t i = 0; i < live.size(); ++i)
      for (std::size_t j = i + 1; j < live.size(); ++j) {
        const auto &p = live[i], &q = live[j];
        const bool apart_x = std::abs(p.x(step) - q.x(step)) >= p.a() + q.a() + kClearance;
        const bool apart_y = std::abs(p.y - q.y) >= p.b() + q.b() + kClearance;
        if (!apart_x && !apart_y) fail("groups " + p.name + " and " + q.name + " overlap at step " + std::to_string(step));
      }

    const double t = time_of(run, step);
    for (const auto& pe : pending) {
      tracking::Event ev;
      ev.type = pe.type;
      ev.time = t;
      if (pe.type == tracking::EventType::merge) {
        ev.node_ids.push_back(node_id(live, step, pe.after[0]));
        std::vector<std::pair<std::string, std::size_t>> parents;
        for (const auto& p : pe.before) {
          const auto id = node_id(before, step - 1, p);
          parents.push_back({id, std::stoul(id.substr(id.find('g') + 1))});
        }
        std::sort(parents.begin(), parents.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
        for (const auto& p : parents) ev.node_ids.push_back(p.first);
      } else if (pe.type == tracking::EventType::split) {
        ev.node_ids.push_back(node_id(before, step - 1, pe.before[0]));
        std::vector<std::pair<std::string, std::size_t>> children;
        for (const auto& c : pe.after) {
          const auto id = node_id(live, step, c);
          children.push_back({id, std::stoul(id.substr(id.find('g') + 1))});
        }
        std::sort(children.begin(), children.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
        for (const auto& c : children) ev.node_ids.push_back(c.first);
      } else {
        ev.node_ids.push_back(node_id(live, step, pe.after[0]));
      }
      sim.events.push_back(std::move(ev));
    }
    for (const auto& op : run.script)
      if (op.kind == ScriptOp::Kind::exit && op.step == step)
        sim.events.push_back({tracking::EventType::exit, t, {node_id(live, step, op.from.at(0))}, std::nullopt});

    sim.steps.push_back(live);
  }

  std::stable_sort(sim.events.begin(), sim.events.end(), [](const tracking::Event& a, const tracking::Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.type != b.type) return a.type < b.type;
    return a.node_ids < b.node_ids;
  });
  return sim;
}

double blob_metric(double u, double v) { return u * u * u * u + v * v * v * v; }

double round_to(double v, double quantum) { return std::round(v / quantum) * quantum; }

struct Row {
  std::int64_t id;
  double x, y, temperature, diameter;
  bool ice;
  double pressure;
};

struct SnapshotWriter {
  const RunSpec& run;
  std::mt19937_64& rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  double temperature(double x) {
    return run.ambient.temperature + kExitTemperature * std::exp(-std::max(0.0, x) / kDecayLength) + 0.3 * normal(rng);
  }

  Row make(std::int64_t id, double x, double y, bool ice, std::size_t step) {
    const double d = ice ? 2e-6 * (1.0 + 0.1 * static_cast<double>(step)) * std::exp(0.2 * normal(rng))
                         : 4e-8 * std::exp(0.2 * normal(rng));
    return Row{id,
               round_to(x, 1e-6),
               round_to(y, 1e-6),
               round_to(temperature(x), 1e-4),
               std::max(1e-10, round_to(d, 1e-11)),
               ice,
               round_to(23000.0 + 5.0 * normal(rng), 1e-2)};
  }

  // n offsets filling the superellipse |x/a|^4 + |y/b|^4 <= 1: one point
  // jittered inside each of n lattice cells, so gaps stay below two cells
  std::vector<std::pair<double, double>> blob(std::size_t n, double a, double b) {
    double h = std::sqrt(3.7081 * a * b / static_cast<double>(n));
    std::vector<std::pair<double, double>> cells;
    for (;;) {
      cells.clear();
      const auto ni = static_cast<long>(std::ceil(a / h)), nj = static_cast<long>(std::ceil(b / h));
      for (long j = -nj; j < nj; ++j)
        for (long i = -ni; i < ni; ++i) {
          const double cx = (static_cast<double>(i) + 0.5) * h, cy = (static_cast<double>(j) + 0.5) * h;
          if (blob_metric(cx / a, cy / b) <= 1.0) cells.push_back({cx, cy});
        }
      if (cells.size() >= n) break;
      h *= 0.99;
    }
    for (std::size_t i = cells.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(unit(rng) * static_cast<double>(i));
      std::swap(cells[i - 1], cells[std::min(j, i - 1)]);
    }
    cells.resize(n);
    for (auto& [x, y] : cells) {
      x += (unit(rng) - 0.5) * h;
      y += (unit(rng) - 0.5) * h;
    }
    return cells;
  }

  void non_ice(std::vector<Row>& rows, std::size_t step) {
    for (std::size_t i = 0; i < run.non_ice_particles; ++i) {
      const double x = run.ice_onset_distance * unit(rng);
      const double y = (2.0 * unit(rng) - 1.0) * (2.0 + 0.3 * x);
      rows.push_back(make(kNonIceIdBase + static_cast<std::int64_t>(i), x, y, false, step));
    }
  }
};

ParticleSnapshot to_snapshot(std::vector<Row>& rows, double time) {
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
  ParticleSnapshot s;
  s.time = time;
  s.dim = 2;
  s.reserve(rows.size());
  for (const auto& r : rows) s.push_row(r.id, r.x, r.y, std::nullopt, r.temperature, r.diameter, r.ice, r.pressure);
  return s;
}

std::mt19937_64 rng_for(std::uint64_t seed, std::size_t run_index, std::size_t step) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run_index), static_cast<std::uint32_t>(step)};
  return std::mt19937_64(seq);
}

ParticleSnapshot group_snapshot(const SynthConfig& cfg, const RunSpec& run, std::size_t run_index, std::size_t step,
                                const std::vector<LiveGroup>& live) {
  auto rng = rng_for(cfg.seed, run_index, step);
  SnapshotWriter w{run, rng};
  std::vector<Row> rows;
  w.non_ice(rows, step);

  std::size_t planted = 0;
  double xmax = run.ice_onset_distance + 1.0, ymin = -10.0, ymax = 10.0;
  for (const auto& g : live) {
    const double cx = g.x(step), a = g.a(), b = g.b();
    const auto offsets = w.blob(g.count, a, b);
    std::size_t next = 0;
    for (const auto& [lo, hi] : g.ranges)
      for (std::int64_t id = lo; id <= hi; ++id, ++next)
        rows.push_back(w.make(id, cx + offsets[next].first, g.y + offsets[next].second, true, step));
    planted += g.count;
    xmax = std::max(xmax, cx + a);
    ymin = std::min(ymin, g.y - b - 10.0);
    ymax = std::max(ymax, g.y + b + 10.0);
  }

  // sparse ice background away from every planted group
  const auto stragglers = static_cast<std::size_t>(std::llround(cfg.straggler_fraction * static_cast<double>(planted)));
  const double margin = 3.0;
  for (std::size_t i = 0; i < stragglers; ++i) {
    for (;;) {
      const double x = run.ice_onset_distance + (xmax - run.ice_onset_distance) * w.unit(rng);
      const double y = ymin + (ymax - ymin) * w.unit(rng);
      bool clear = true;
      for (const auto& g : live) {
        const double dx = (x - g.x(step)) / (g.a() + margin), dy = (y - g.y) / (g.b() + margin);
        if (blob_metric(dx, dy) <= 1.0) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      rows.push_back(w.make(kStragglerIdBase + static_cast<std::int64_t>(i), x, y, true, step));
      break;
    }
  }
  return to_snapshot(rows, time_of(run, step));
}

double plume_half_height(const RunSpec& run, double x) {
  const double f = std::clamp((x - run.ice_onset_distance) / run.plume_length, 0.0, 1.0);
  return run.plume_height * (0.3 + 0.7 * f);
}

ParticleSnapshot plume_snapshot(const SynthConfig& cfg, const RunSpec& run, std::size_t run_index, std::size_t step) {
  auto rng = rng_for(cfg.seed, run_index, step);
  SnapshotWriter w{run, rng};
  std::vector<Row> rows;
  w.non_ice(rows, step);
  const double x0 = run.ice_onset_distance, x1 = x0 + run.plume_length;
  for (std::size_t i = 0; i < run.plume_particles; ++i) {
    for (;;) {
      const double x = x0 + run.plume_length * w.unit(rng);
      const double h = plume_half_height(run, x);
      if (w.unit(rng) * run.plume_height > h) continue;  // uniform density over the wedge
      const double y = (2.0 * w.unit(rng) - 1.0) * h;
      rows.push_back(w.make(static_cast<std::int64_t>(i), x, y, true, step));
      break;
    }
  }
  const auto stragglers =
      static_cast<std::size_t>(std::llround(cfg.straggler_fraction * static_cast<double>(run.plume_particles)));
  const double ylim = 1.5 * run.plume_height + 5.0;
  for (std::size_t i = 0; i < stragglers; ++i) {
    for (;;) {
      const double x = x0 + run.plume_length * w.unit(rng);
      const double y = (2.0 * w.unit(rng) - 1.0) * ylim;
      if (std::abs(y) <= plume_half_height(run, x) + 3.0) continue;
      rows.push_back(w.make(kStragglerIdBase + static_cast<std::int64_t>(i), x, y, true, step));
      break;
    }
  }
  (void)x1;
  return to_snapshot(rows, time_of(run, step));
}

void validate_run(const RunSpec& run) {
  auto fail = [&](const std::string& msg) { throw Error(ErrorKind::ConfigError, run.run_id + ": " + msg); };
  if (run.run_id.empty()) throw Error(ErrorKind::ConfigError, "run without run_id");
  if (run.input_params.empty() || run.boundary_conditions.empty()) fail("parameter maps must be non-empty");
  if (!(run.dt > 0)) fail("dt must be positive");
  if (!(run.ice_onset_distance > 0)) fail("ice_onset_distance must be positive");
  if (run.shape_family) {
    if (!run.groups.empty() || !run.script.empty()) fail("plume runs take no group script");
    if (run.plume_particles == 0) fail("plume run without particles");
    if (!(run.plume_length > 0) || !(run.plume_height > 0)) fail("plume extent must be positive");
  } else {
    if (run.groups.empty()) fail("run has neither groups nor a shape family");
    simulate(run);
  }
}

ordered_json state_json(const StatePoint& s) {
  return ordered_json{{"temperature", s.temperature}, {"vapor_pressure", s.vapor_pressure}};
}

StatePoint state_from(const ordered_json& j) {
  return StatePoint{j.at("temperature").get<double>(), j.at("vapor_pressure").get<double>()};
}

std::map<std::string, std::string> base_input_params() {
  return {{"engine", "two-stream"},     {"grid", "coarse"},          {"geometry", "axisymmetric"},
          {"scope", "near-field"},      {"solver", "lagrangian"},    {"turbulence", "k-omega-sst"},
          {"time_scheme", "implicit"},  {"space_scheme", "upwind2"}, {"mesh_topology", "structured"},
          {"chemistry", "frozen"},      {"soot_model", "monodisperse"}, {"ice_model", "kappa-koehler"},
          {"wake_model", "none"},       {"nozzle", "separate-flow"},   {"fuel", "jet-a1"},
          {"coupling", "two-way"}};
}

std::map<std::string, std::string> base_boundary_conditions() {
  return {{"altitude", "11km"},
          {"mach", "0.78"},
          {"ambient_pressure", "23000Pa"},
          {"relative_humidity_ice", "120%"},
          {"inlet_profile", "uniform"},
          {"outlet", "pressure-outlet"},
          {"farfield", "freestream"},
          {"wall", "no-slip"},
          {"turbulence_intensity", "1%"},
          {"soot_emission_index", "1e15/kg"},
          {"water_emission_index", "1.25kg/kg"},
          {"exhaust_temperature", "580K"},
          {"exhaust_velocity", "400m/s"},
          {"bypass_ratio", "5"},
          {"latitude", "mid"},
          {"season", "winter"}};
}

}  // namespace

void default_script(RunSpec& run, std::size_t planted_ice) {
  const double scale = static_cast<double>(planted_ice) / 17000.0;
  auto n = [&](double base) { return std::max<std::size_t>(8, static_cast<std::size_t>(std::llround(base * scale))); };
  run.timesteps = std::max<std::size_t>(run.timesteps, 10);
  run.groups = {{"A", n(2400), 50.0, 20.0}, {"B", n(2400), 30.0, 20.0}, {"F", n(2000), 10.0, 40.0},
                {"C", n(2400), -10.0, 20.0}, {"D", n(2400), -30.0, 20.0}, {"E", n(3000), -55.0, 20.0}};
  using K = ScriptOp::Kind;
  run.script = {
      {K::merge, 3, {"A", "B"}, {"AB"}, 0, 0.0, 20.0},
      {K::appear, 4, {}, {"G"}, n(2400), 75.0, 20.0},
      {K::split, 5, {"E"}, {"E1", "E2"}, 0, 0.0, 20.0},
      {K::merge, 6, {"C", "D"}, {"CD"}, 0, 0.0, 20.0},
      {K::exit, 7, {"F"}, {}, 0, 0.0, 20.0},
  };
}

SynthConfig default_config(std::uint64_t seed, std::size_t particles_per_step) {
  SynthConfig cfg;
  cfg.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  const std::size_t non_ice = particles_per_step / 10;
  const std::size_t planted = particles_per_step - non_ice - particles_per_step / 100;

  for (int i = 0; i < 19; ++i) {
    RunSpec r;
    char id[16];
    std::snprintf(id, sizeof id, "run-%02d", i + 1);
    r.run_id = id;
    r.input_params = base_input_params();
    r.boundary_conditions = base_boundary_conditions();
    // two hidden ambient-temperature groups, not visible in the parameters
    const bool cold = (i * 7) % 19 < 10;
    r.hidden_group = cold ? "cold" : "warm";
    r.ambient = {(cold ? 212.0 : 226.0) + 0.5 * jitter(rng), cold ? 1.6 : 5.2};
    r.exhaust = {580.0, 560.0};
    r.timesteps = 10;
    r.dt = 0.5;
    r.non_ice_particles = non_ice;
    default_script(r, planted);
    cfg.runs.push_back(std::move(r));
  }

  const char* altitudes[] = {"10km", "10.5km", "11.5km", "12km", "12.5km"};
  for (int i = 0; i < 10; ++i) {
    RunSpec r;
    char id[16];
    std::snprintf(id, sizeof id, "run-%02d", 20 + i);
    r.run_id = id;
    r.input_params = base_input_params();
    r.boundary_conditions = base_boundary_conditions();
    const bool wide = i % 2 == 1;
    r.shape_family = wide ? Family::wide : Family::narrow;
    r.input_params["engine"] = wide ? "two-stream" : "single-stream";
    r.input_params["grid"] = "fine";
    r.input_params["nozzle"] = wide ? "mixed-flow" : "separate-flow";
    r.boundary_conditions["altitude"] = altitudes[i / 2];
    r.hidden_group = "";
    // wide members run colder; narrow members carry more ice particles
    r.ambient = {(wide ? 214.0 : 222.0) + 2.0 * jitter(rng), 3.0};
    r.exhaust = {580.0, 560.0};
    r.timesteps = 1;
    r.dt = 10.0;
    r.non_ice_particles = non_ice;
    r.plume_particles = static_cast<std::size_t>(static_cast<double>(planted) * (wide ? 1.0 : 1.12 + 0.04 * jitter(rng)));
    r.plume_length = 300.0 * (1.0 + 0.05 * jitter(rng));
    r.plume_height = (wide ? 30.0 : 10.0) * (1.0 + 0.05 * jitter(rng));
    cfg.runs.push_back(std::move(r));
  }
  return cfg;
}

SynthConfig small_config(std::uint64_t seed, std::size_t multi, std::size_t finals, std::size_t particles_per_step,
                         std::size_t timesteps) {
  SynthConfig full = default_config(seed, particles_per_step);
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.straggler_fraction = full.straggler_fraction;
  for (std::size_t i = 0; i < multi && i < 19; ++i) {
    RunSpec r = full.runs[i];
    if (timesteps < 10) {
      r.script.clear();
      r.groups.resize(std::min<std::size_t>(r.groups.size(), 3));
    }
    r.timesteps = timesteps;
    cfg.runs.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < finals && i < 10; ++i) cfg.runs.push_back(full.runs[19 + i]);
  return cfg;
}

void validate_config(const SynthConfig& config) {
  if (config.runs.empty()) throw Error(ErrorKind::ConfigError, "config has no runs");
  if (!(config.straggler_fraction >= 0) || config.straggler_fraction > 0.5)
    throw Error(ErrorKind::ConfigError, "straggler_fraction must lie in [0, 0.5]");
  std::set<std::string> ids;
  for (const auto& r : config.runs) {
    if (!ids.insert(r.run_id).second) throw Error(ErrorKind::ConfigError, "duplicate run_id " + r.run_id);
    validate_run(r);
  }
}

std::vector<tracking::Event> expected_events(const RunSpec& run) {
  if (run.shape_family) return {};
  return simulate(run).events;
}

std::string config_to_json(const SynthConfig& config) {
  ordered_json j;
  j["seed"] = config.seed;
  j["straggler_fraction"] = config.straggler_fraction;
  j["runs"] = ordered_json::array();
  for (const auto& r : config.runs) {
    ordered_json rj;
    rj["run_id"] = r.run_id;
    rj["input_params"] = r.input_params;
    rj["boundary_conditions"] = r.boundary_conditions;
    rj["exhaust"] = state_json(r.exhaust);
    rj["ambient"] = state_json(r.ambient);
    rj["timesteps"] = r.timesteps;
    rj["dt"] = r.dt;
    rj["non_ice_particles"] = r.non_ice_particles;
    rj["ice_onset_distance"] = r.ice_onset_distance;
    rj["hidden_group"] = r.hidden_group;
    if (r.shape_family) {
      rj["shape_family"] = to_string(*r.shape_family);
      rj["plume_particles"] = r.plume_particles;
      rj["plume_length"] = r.plume_length;
      rj["plume_height"] = r.plume_height;
    } else {
      rj["groups"] = ordered_json::array();
      for (const auto& g : r.groups)
        rj["groups"].push_back({{"name", g.name}, {"count", g.count}, {"y", g.y}, {"speed", g.speed}});
      rj["script"] = ordered_json::array();
      for (const auto& op : r.script) {
        ordered_json oj{{"kind", to_string(op.kind)}, {"step", op.step}, {"from", op.from}, {"to", op.to}};
        if (op.kind == ScriptOp::Kind::appear) {
          oj["count"] = op.count;
          oj["y"] = op.y;
          oj["speed"] = op.speed;
        }
        rj["script"].push_back(oj);
      }
    }
    j["runs"].push_back(rj);
  }
  return j.dump(2) + "\n";
}

SynthConfig config_from_json(const std::string& text) {
  SynthConfig cfg;
  try {
    const auto j = ordered_json::parse(text);
    cfg.seed = j.value("seed", std::uint64_t{7});
    cfg.straggler_fraction = j.value("straggler_fraction", 0.01);
    for (const auto& rj : j.at("runs")) {
      RunSpec r;
      r.run_id = rj.at("run_id").get<std::string>();
      r.input_params = rj.at("input_params").get<std::map<std::string, std::string>>();
      r.boundary_conditions = rj.at("boundary_conditions").get<std::map<std::string, std::string>>();
      r.exhaust = state_from(rj.at("exhaust"));
      r.ambient = state_from(rj.at("ambient"));
      r.timesteps = rj.at("timesteps").get<std::size_t>();
      r.dt = rj.value("dt", 0.5);
      r.non_ice_particles = rj.value("non_ice_particles", std::size_t{2000});
      r.ice_onset_distance = rj.value("ice_onset_distance", 20.0);
      r.hidden_group = rj.value("hidden_group", std::string());
      if (rj.contains("shape_family")) {
        const auto f = rj.at("shape_family").get<std::string>();
        if (f != "narrow" && f != "wide") throw Error(ErrorKind::ConfigError, "unknown shape_family " + f);
        r.shape_family = f == "wide" ? Family::wide : Family::narrow;
        r.plume_particles = rj.at("plume_particles").get<std::size_t>();
        r.plume_length = rj.value("plume_length", 300.0);
        r.plume_height = rj.value("plume_height", 10.0);
      }
      if (rj.contains("groups"))
        for (const auto& g : rj.at("groups"))
          r.groups.push_back({g.at("name").get<std::string>(), g.at("count").get<std::size_t>(), g.value("y", 0.0),
                              g.value("speed", 20.0)});
      if (rj.contains("script"))
        for (const auto& o : rj.at("script")) {
          ScriptOp op;
          op.kind = kind_from_string(o.at("kind").get<std::string>());
          op.step = o.at("step").get<std::size_t>();
          op.from = o.value("from", std::vector<std::string>{});
          op.to = o.value("to", std::vector<std::string>{});
          op.count = o.value("count", std::size_t{0});
          op.y = o.value("y", 0.0);
          op.speed = o.value("speed", 20.0);
          r.script.push_back(std::move(op));
        }
      cfg.runs.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  validate_config(cfg);
  return cfg;
}

GenerateSummary generate_synthetic(const SynthConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config);
  GenerateSummary summary;
  std::filesystem::create_directories(out_dir);

  ordered_json truth;
  truth["seed"] = config.seed;
  truth["filter"] = {{"predicate", kPlantedFilter}, {"matches", ordered_json::array()}};
  truth["runs"] = ordered_json::array();
  ordered_json families = {{"narrow", ordered_json::array()}, {"wide", ordered_json::array()}};
  ordered_json hidden = ordered_json::object();
  ordered_json events = ordered_json::object();
  ordered_json planted = ordered_json::object();

  for (std::size_t ri = 0; ri < config.runs.size(); ++ri) {
    const RunSpec& spec = config.runs[ri];
    SimulationRun run;
    run.manifest.run_id = spec.run_id;
    run.manifest.grid_kind = GridKind::planar2d;
    run.manifest.input_params = spec.input_params;
    run.manifest.boundary_conditions = spec.boundary_conditions;
    run.manifest.mixing_line = std::make_pair(spec.exhaust, spec.ambient);
    for (std::size_t s = 0; s < spec.timesteps; ++s) run.manifest.timesteps.push_back(time_of(spec, s));

    ordered_json rj{{"run_id", spec.run_id},
                    {"kind", spec.shape_family ? "final_structure" : "multi_timestep"},
                    {"family", spec.shape_family ? ordered_json(to_string(*spec.shape_family)) : ordered_json(nullptr)},
                    {"hidden_group", spec.hidden_group.empty() ? ordered_json(nullptr) : ordered_json(spec.hidden_group)},
                    {"ambient_temperature", spec.ambient.temperature}};
    truth["runs"].push_back(rj);

    bool matches = true;
    const auto params = run.manifest.all_parameters();
    for (const auto& [k, v] : kPlantedFilter) {
      const auto it = params.find(k);
      matches = matches && it != params.end() && it->second == v;
    }
    if (matches) truth["filter"]["matches"].push_back(spec.run_id);
    if (spec.shape_family) families[to_string(*spec.shape_family)].push_back(spec.run_id);
    if (!spec.hidden_group.empty()) hidden[spec.hidden_group].push_back(spec.run_id);

    if (spec.shape_family) {
      for (std::size_t s = 0; s < spec.timesteps; ++s) run.snapshots.push_back(plume_snapshot(config, spec, ri, s));
    } else {
      const Simulation sim = simulate(spec);
      ordered_json ev = ordered_json::array();
      for (const auto& e : sim.events)
        ev.push_back({{"type", tracking::to_string(e.type)}, {"time", e.time}, {"node_ids", e.node_ids}});
      events[spec.run_id] = ev;
      ordered_json steps = ordered_json::array();
      for (std::size_t s = 0; s < spec.timesteps; ++s) {
        run.snapshots.push_back(group_snapshot(config, spec, ri, s, sim.steps[s]));
        ordered_json gs = ordered_json::array();
        for (std::size_t g = 0; g < sim.steps[s].size(); ++g) {
          const auto& lg = sim.steps[s][g];
          ordered_json ranges = ordered_json::array();
          for (const auto& [lo, hi] : lg.ranges) ranges.push_back({lo, hi});
          gs.push_back({{"name", lg.name},
                        {"node_id", "c" + std::to_string(s) + "g" + std::to_string(g)},
                        {"count", lg.count},
                        {"id_ranges", ranges}});
        }
        steps.push_back({{"time", time_of(spec, s)}, {"groups", gs}});
      }
      planted[spec.run_id] = steps;
    }
    for (const auto& snap : run.snapshots) summary.particles += snap.size();
    summary.snapshots += run.snapshots.size();
    write_run(run, out_dir / spec.run_id);
    ++summary.runs;
  }
  truth["families"] = families;
  truth["temperature_groups"] = hidden;
  truth["events"] = events;
  truth["planted_groups"] = planted;
  write_text_file(out_dir / "ground_truth.json", truth.dump(2) + "\n");
  write_text_file(out_dir / "synth_config.json", config_to_json(config));
  return summary;
}

}  // namespace contrail::synth
