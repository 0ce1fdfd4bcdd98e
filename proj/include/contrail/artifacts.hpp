// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// JSON forms of the per-run and ensemble artifacts. Keys keep a fixed order
// so serialized bytes (and their checksums) are stable.

#include <map>
#include <string>
#include <vector>

#include "contrail/attributes.hpp"
#include "contrail/grouping.hpp"
#include "contrail/ingest.hpp"
#include "contrail/shape.hpp"
#include "contrail/similarity.hpp"
#include "contrail/thermo.hpp"
#include "contrail/tracking.hpp"
#include "json.hpp"

namespace contrail::artifacts {

using Json = nlohmann::ordered_json;

Json summary_json(const attributes::ContrailSummary& s);
Json summaries_json(const std::vector<attributes::ContrailSummary>& s);
std::vector<attributes::ContrailSummary> summaries_from_json(const Json& j);

/// {time, alpha, boundary, characteristics, removed_ids}; a timestep whose
/// shape could not be extracted carries an "error" string and an empty boundary.
Json shape_json(const shape::ContrailShape& s);
Json shape_error_json(double time, const std::string& error);

Json groups_json(const grouping::GroupAssignment& a);
Json groups_json(const std::vector<grouping::GroupAssignment>& a);

Json tracking_json(const tracking::TrackingGraph& g);

Json neighbors_json(const similarity::NeighborIndex& index);
similarity::NeighborIndex neighbors_from_json(const Json& j);

Json schema_json(const ParameterSchema& schema);

Json criterion_json(const thermo::MixingLine& line, const thermo::FormationVerdict& verdict,
                    const thermo::CriterionPlot& plot);
/// Reads {"exhaust": {"T", "P_v"}, "ambient": {"T", "P_v"}}; throws SchemaError.
thermo::MixingLine mixing_line_from_json(const Json& j);

struct GlyphGroup {
  std::vector<std::string> run_ids;
  std::map<std::string, std::string> values;  // diff attributes only
};

struct GlyphDiff {
  std::vector<std::string> diff_attributes;
  std::vector<GlyphGroup> groups;
};

Json glyphs_json(const GlyphDiff& d);

struct FilamentPoint {
  double time = 0.0;
  double value = 0.0;
  double relative_change = 0.0;
};

/// attribute -> run_id -> series
using FilamentSet = std::map<std::string, std::map<std::string, std::vector<FilamentPoint>>>;

Json filaments_json(const FilamentSet& f);

/// Two-space-indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace contrail::artifacts
