// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contrail/error.hpp"
#include "contrail/simd/kernels.hpp"

namespace contrail::similarity {

GowerResult gower(const ParameterVector& a, const ParameterVector& b, const std::map<std::string, NumericRange>& ranges,
                  bool strict) {
  GowerResult r;
  double sum = 0.0;

  for (const auto& [name, va] : a.categorical) {
    const auto it = b.categorical.find(name);
    if (it == b.categorical.end()) {
      if (strict) throw Error(ErrorKind::SchemaMismatch, name);
      ++r.excluded;
      continue;
    }
    sum += va == it->second ? 1.0 : 0.0;
    ++r.attributes;
  }
  for (const auto& [name, vb] : b.categorical) {
    if (a.categorical.count(name)) continue;
    if (strict) throw Error(ErrorKind::SchemaMismatch, name);
    ++r.excluded;
  }

  for (const auto& [name, va] : a.numerical) {
    const auto it = b.numerical.find(name);
    if (it == b.numerical.end()) {
      if (strict) throw Error(ErrorKind::SchemaMismatch, name);
      ++r.excluded;
      continue;
    }
    const auto range = ranges.find(name);
    if (range == ranges.end()) throw Error(ErrorKind::SchemaMismatch, "no range for " + name);
    const double span = range->second.max - range->second.min;
    const double diff = std::abs(va - it->second);
    double partial;
    if (span > 0) {
      partial = 1.0 - diff / span;
    } else {
      if (diff != 0.0) throw Error(ErrorKind::SchemaMismatch, "values differ over a zero range: " + name);
      partial = 1.0;
      ++r.zero_range;
    }
    sum += partial;
    ++r.attributes;
  }
  for (const auto& [name, vb] : b.numerical) {
    if (a.numerical.count(name)) continue;
    if (strict) throw Error(ErrorKind::SchemaMismatch, name);
    ++r.excluded;
  }

  r.similarity = r.attributes ? sum / static_cast<double>(r.attributes) : 1.0;
  r.distance = 1.0 - r.similarity;
  return r;
}

double directed_hausdorff(const PointSet& from, const PointSet& to) {
  if (from.empty() || to.empty()) throw Error(ErrorKind::EmptySet, "hausdorff of an empty set");
  const auto& k = simd::kernels();
  simd::CoordsView target = to.view();
  if (from.dim != to.dim) throw Error(ErrorKind::InvalidArgument, "point sets differ in dimension");
  double worst = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    const double d = k.min_sq_distance(target, from.x[i], from.y[i], from.dim == 3 ? from.z[i] : 0.0);
    worst = std::max(worst, d);
  }
  return std::sqrt(worst);
}

double hausdorff_distance(const PointSet& a, const PointSet& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

Standardization standardize(const std::vector<ShapeFeatureVector>& vectors) {
  Standardization s;
  const double n = static_cast<double>(vectors.size());
  if (vectors.empty()) return s;
  for (std::size_t f = 0; f < kShapeFeatureNames.size(); ++f) {
    double mean = 0.0;
    for (const auto& v : vectors) mean += v.features[f];
    mean /= n;
    double var = 0.0;
    for (const auto& v : vectors) var += (v.features[f] - mean) * (v.features[f] - mean);
    s.mean[f] = mean;
    s.stddev[f] = std::sqrt(var / n);
    if (!(s.stddev[f] > 0)) s.dropped.emplace_back(kShapeFeatureNames[f]);
  }
  return s;
}

double shape_distance(const ShapeFeatureVector& a, const ShapeFeatureVector& b, const Standardization& s) {
  double sum = 0.0;
  for (std::size_t f = 0; f < kShapeFeatureNames.size(); ++f) {
    if (!(s.stddev[f] > 0)) continue;
    const double d = (a.features[f] - b.features[f]) / s.stddev[f];
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::parameters: return "parameters";
    case Mode::shape: return "shape";
    case Mode::hausdorff: return "hausdorff";
  }
  return "parameters";
}

Mode mode_from_string(const std::string& s) {
  if (s == "parameters") return Mode::parameters;
  if (s == "shape") return Mode::shape;
  if (s == "hausdorff") return Mode::hausdorff;
  throw Error(ErrorKind::InvalidArgument, "unknown mode " + s);
}

NeighborIndex knn_from_matrix(Mode mode, const std::vector<std::string>& ids,
                              const std::vector<std::vector<double>>& distance, std::size_t k) {
  if (ids.size() < 2) throw Error(ErrorKind::TooFewMembers, std::to_string(ids.size()));
  NeighborIndex index;
  index.mode = mode;
  index.k = k;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<Neighbor> all;
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (j != i) all.push_back({ids[j], distance[i][j]});
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.distance != b.distance ? a.distance < b.distance : a.run_id < b.run_id;
    });
    if (all.size() > k) all.resize(k);
    index.neighbors[ids[i]] = std::move(all);
  }
  return index;
}

namespace {

template <typename Fn>
std::vector<std::vector<double>> pairwise(std::size_t n, Fn&& fn) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = fn(i, j);
  return m;
}

}  // namespace

NeighborIndex knn_parameters(const std::vector<ParameterVector>& vectors,
                             const std::map<std::string, NumericRange>& ranges, std::size_t k) {
  std::vector<std::string> ids;
  for (const auto& v : vectors) ids.push_back(v.run_id);
  const auto m = pairwise(vectors.size(), [&](std::size_t i, std::size_t j) {
    return gower(vectors[i], vectors[j], ranges, false).distance;
  });
  return knn_from_matrix(Mode::parameters, ids, m, k);
}

NeighborIndex knn_shape(const std::vector<ShapeFeatureVector>& vectors, std::size_t k, Standardization* out) {
  const Standardization s = standardize(vectors);
  if (out) *out = s;
  std::vector<std::string> ids;
  for (const auto& v : vectors) ids.push_back(v.run_id);
  const auto m =
      pairwise(vectors.size(), [&](std::size_t i, std::size_t j) { return shape_distance(vectors[i], vectors[j], s); });
  return knn_from_matrix(Mode::shape, ids, m, k);
}

NeighborIndex knn_hausdorff(const std::vector<std::pair<std::string, PointSet>>& boundaries, std::size_t k) {
  std::vector<std::string> ids;
  for (const auto& b : boundaries) ids.push_back(b.first);
  const auto m = pairwise(boundaries.size(), [&](std::size_t i, std::size_t j) {
    return hausdorff_distance(boundaries[i].second, boundaries[j].second);
  });
  return knn_from_matrix(Mode::hausdorff, ids, m, k);
}

}  // namespace contrail::similarity
