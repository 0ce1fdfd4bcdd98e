// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "contrail/geometry.hpp"
#include "contrail/ingest.hpp"

namespace contrail::similarity {

struct ParameterVector {
  std::string run_id;
  std::map<std::string, std::string> categorical;
  std::map<std::string, double> numerical;
};

struct GowerResult {
  double similarity = 1.0;
  double distance = 0.0;
  std::size_t attributes = 0;  // n
  /// present in only one of the two vectors (lenient mode)
  std::size_t excluded = 0;
  /// numeric attributes whose observed range is zero
  std::size_t zero_range = 0;
};

/// Gower similarity: mean over attributes of 1 - |a - b| / range for numeric
/// values and equality for categorical ones; distance = 1 - similarity.
/// Strict mode throws Error(SchemaMismatch) unless both vectors carry the
/// same attributes; lenient mode averages over the shared ones.
GowerResult gower(const ParameterVector& a, const ParameterVector& b, const std::map<std::string, NumericRange>& ranges,
                  bool strict = true);

inline double gower_distance(const ParameterVector& a, const ParameterVector& b,
                             const std::map<std::string, NumericRange>& ranges) {
  return gower(a, b, ranges).distance;
}

/// Symmetric Hausdorff distance. Throws Error(EmptySet) if either set is empty.
double hausdorff_distance(const PointSet& a, const PointSet& b);
double directed_hausdorff(const PointSet& from, const PointSet& to);

inline constexpr std::array<std::string_view, 7> kShapeFeatureNames{
    "area", "length", "height", "slope", "total_particles", "total_mass", "mean_temperature"};

struct ShapeFeatureVector {
  std::string run_id;
  std::array<double, 7> features{};
};

struct Standardization {
  std::array<double, 7> mean{};
  std::array<double, 7> stddev{};
  /// features with zero spread, left out of the distance
  std::vector<std::string> dropped;
};

Standardization standardize(const std::vector<ShapeFeatureVector>& vectors);
double shape_distance(const ShapeFeatureVector& a, const ShapeFeatureVector& b, const Standardization& s);

enum class Mode { parameters, shape, hausdorff };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct Neighbor {
  std::string run_id;
  double distance = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct NeighborIndex {
  Mode mode = Mode::parameters;
  std::size_t k = 5;
  std::map<std::string, std::vector<Neighbor>> neighbors;
};

/// k nearest other members per member from a symmetric distance matrix;
/// ties broken by run_id. Throws Error(TooFewMembers) below two members.
NeighborIndex knn_from_matrix(Mode mode, const std::vector<std::string>& ids,
                              const std::vector<std::vector<double>>& distance, std::size_t k);

NeighborIndex knn_parameters(const std::vector<ParameterVector>& vectors,
                             const std::map<std::string, NumericRange>& ranges, std::size_t k = 5);
NeighborIndex knn_shape(const std::vector<ShapeFeatureVector>& vectors, std::size_t k = 5,
                        Standardization* standardization = nullptr);
NeighborIndex knn_hausdorff(const std::vector<std::pair<std::string, PointSet>>& boundaries, std::size_t k = 5);

}  // namespace contrail::similarity
