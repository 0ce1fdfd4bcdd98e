// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Hand-built group assignments and random event flows for tracking tests.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "contrail/grouping.hpp"

namespace fixtures {

using contrail::grouping::GroupAssignment;

// Builds an assignment from explicit member lists; groups are renumbered by
// smallest member id like the clustering output.
inline GroupAssignment assignment(double time, std::vector<std::vector<std::int64_t>> groups,
                                     std::vector<std::int64_t> noise = {}, double eps = 1.0) {
  groups.erase(std::remove_if(groups.begin(), groups.end(), [](const auto& g) { return g.empty(); }), groups.end());
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end());
  GroupAssignment a;
  a.time = time;
  a.eps = eps;
  a.min_pts = 4;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    contrail::grouping::GroupStats s;
    s.id = static_cast<int>(k);
    s.particle_ids = groups[k];
    s.count = groups[k].size();
    s.centroid = {static_cast<double>(groups[k].front()), 0.0};
    s.mass = static_cast<double>(s.count);
    a.groups.push_back(s);
    for (auto id : groups[k]) {
      a.ice_ids.push_back(id);
      a.labels.push_back(static_cast<int>(k));
    }
  }
  for (auto id : noise) {
    a.ice_ids.push_back(id);
    a.labels.push_back(contrail::grouping::kNoise);
  }
  a.noise_count = noise.size();
  return a;
}

inline std::vector<std::int64_t> range(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(hi - lo + 1));
  std::iota(v.begin(), v.end(), lo);
  return v;
}

// Random particle flow with persistent membership and occasional reshuffles.
inline std::vector<GroupAssignment> random_flow(std::mt19937_64& rng, std::size_t columns, int max_groups) {
  std::uniform_int_distribution<int> ngroups(1, max_groups);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::int64_t n = 60;
  std::vector<int> label(static_cast<std::size_t>(n));
  int k = ngroups(rng);
  for (auto& l : label) l = static_cast<int>(rng() % static_cast<unsigned>(k));
  std::vector<GroupAssignment> out;
  for (std::size_t c = 0; c < columns; ++c) {
    if (c > 0) {
      const int k2 = ngroups(rng);
      std::vector<int> remap(static_cast<std::size_t>(k));
      for (auto& r : remap) r = static_cast<int>(rng() % static_cast<unsigned>(k2));
      for (auto& l : label) l = u(rng) < 0.85 && l >= 0 ? remap[static_cast<std::size_t>(l)] : static_cast<int>(rng() % static_cast<unsigned>(k2));
      k = k2;
    }
    std::vector<std::vector<std::int64_t>> groups(static_cast<std::size_t>(k));
    std::vector<std::int64_t> noise;
    for (std::int64_t id = 0; id < n; ++id) {
      if (u(rng) < 0.05)
        noise.push_back(id);
      else
        groups[static_cast<std::size_t>(label[static_cast<std::size_t>(id)])].push_back(id);
    }
    out.push_back(assignment(static_cast<double>(c), groups, noise));
  }
  return out;
}

// Random event script over block-contiguous groups: persistence with merges,
// splits, appearances and exits, at most six groups per timestep.
inline std::vector<GroupAssignment> scripted_flow(std::mt19937_64& rng, std::size_t columns) {
  std::vector<std::vector<std::int64_t>> groups;
  std::int64_t next_id = 0;
  auto fresh = [&](std::int64_t size) {
    auto g = range(next_id, next_id + size - 1);
    next_id += size;
    return g;
  };
  const int initial = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < initial; ++i) groups.push_back(fresh(5 + static_cast<std::int64_t>(rng() % 20)));
  std::vector<GroupAssignment> out;
  for (std::size_t c = 0; c < columns; ++c) {
    if (c > 0) {
      const int events = static_cast<int>(rng() % 3);
      for (int e = 0; e < events; ++e) {
        const auto pick = [&] { return static_cast<std::size_t>(rng() % groups.size()); };
        switch (rng() % 4) {
          case 0:
            if (groups.size() >= 2) {
              const auto i = pick();
              auto j = pick();
              if (i == j) break;
              groups[i].insert(groups[i].end(), groups[j].begin(), groups[j].end());
              groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
            }
            break;
          case 1:
            if (groups.size() < 6) {
              const auto i = pick();
              if (groups[i].size() < 4) break;
              std::vector<std::int64_t> tail(groups[i].begin() + static_cast<std::ptrdiff_t>(groups[i].size() / 2),
                                             groups[i].end());
              groups[i].resize(groups[i].size() / 2);
              groups.push_back(tail);
            }
            break;
          case 2:
            if (groups.size() < 6) groups.push_back(fresh(5 + static_cast<std::int64_t>(rng() % 20)));
            break;
          default:
            if (groups.size() >= 2) groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(pick()));
        }
      }
    }
    out.push_back(assignment(static_cast<double>(c), groups));
  }
  return out;
}

}  // namespace fixtures
