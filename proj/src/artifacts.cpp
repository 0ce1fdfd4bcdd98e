// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/artifacts.hpp"

#include "contrail/error.hpp"

namespace contrail::artifacts {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json summary_json(const attributes::ContrailSummary& s) {
  return Json{{"time", s.time},
              {"mean_temperature", s.mean_temperature},
              {"ice_count", s.ice_count},
              {"total_mass", s.total_mass},
              {"length", s.length},
              {"no_ice", s.no_ice},
              {"mean_temperature_all", s.mean_temperature_all},
              {"length_2d", s.length_2d},
              {"length_3d", s.length_3d}};
}

Json summaries_json(const std::vector<attributes::ContrailSummary>& s) {
  Json out = Json::array();
  for (const auto& x : s) out.push_back(summary_json(x));
  return out;
}

std::vector<attributes::ContrailSummary> summaries_from_json(const Json& j) {
  std::vector<attributes::ContrailSummary> out;
  try {
    for (const auto& e : j) {
      attributes::ContrailSummary s;
      s.time = e.at("time").get<double>();
      s.mean_temperature = e.at("mean_temperature").get<double>();
      s.ice_count = e.at("ice_count").get<std::size_t>();
      s.total_mass = e.at("total_mass").get<double>();
      s.length = e.at("length").get<double>();
      s.no_ice = e.at("no_ice").get<bool>();
      s.mean_temperature_all = e.value("mean_temperature_all", s.mean_temperature);
      s.length_2d = e.value("length_2d", s.length);
      s.length_3d = e.value("length_3d", s.length);
      out.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("summaries: ") + e.what());
  }
  return out;
}

namespace {

Json polyline(const std::vector<Point2>& pts) {
  Json out = Json::array();
  for (const auto& p : pts) out.push_back(Json::array({p.x, p.y}));
  return out;
}

}  // namespace

Json shape_json(const shape::ContrailShape& s) {
  const auto& c = s.characteristics;
  Json others = Json::array();
  for (const auto& comp : s.shape.other_components) others.push_back(polyline(comp));
  return Json{{"time", s.time},
              {"alpha", s.shape.alpha},
              {"boundary", polyline(s.shape.boundary)},
              {"characteristics", {{"area", c.area}, {"length", c.length}, {"height", c.height}, {"slope", c.slope}}},
              {"removed_ids", s.noise.removed_ids},
              {"disconnected", s.shape.disconnected},
              {"other_components", others},
              {"noise",
               {{"sigma_y", s.noise.sigma_y},
                {"threshold", s.noise.threshold},
                {"upper_regression", {{"slope", s.noise.regression.slope}, {"intercept", s.noise.regression.intercept}}}}}};
}

Json shape_error_json(double time, const std::string& error) {
  return Json{{"time", time},
              {"alpha", nullptr},
              {"boundary", Json::array()},
              {"characteristics", nullptr},
              {"removed_ids", Json::array()},
              {"error", error}};
}

Json groups_json(const grouping::GroupAssignment& a) {
  Json groups = Json::array();
  for (const auto& g : a.groups)
    groups.push_back(Json{{"id", g.id},
                          {"count", g.count},
                          {"centroid", g.centroid},
                          {"mean_temperature", g.mean_temperature},
                          {"mass", g.mass},
                          {"length", g.length}});
  return Json{{"time", a.time},
              {"eps", a.eps},
              {"min_pts", a.min_pts},
              {"groups", groups},
              {"noise_count", a.noise_count},
              {"no_ice", a.no_ice},
              {"no_knee", a.no_knee},
              {"subsampled", a.subsampled}};
}

Json groups_json(const std::vector<grouping::GroupAssignment>& a) {
  Json out = Json::array();
  for (const auto& x : a) out.push_back(groups_json(x));
  return out;
}

Json tracking_json(const tracking::TrackingGraph& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes)
    nodes.push_back(Json{{"id", n.id},
                         {"time", n.time},
                         {"group_id", n.group_id},
                         {"count", n.count},
                         {"mass", n.mass},
                         {"length", n.length},
                         {"mean_temperature", n.mean_temperature},
                         {"row", n.row},
                         {"column", n.column},
                         {"radius", n.radius_hint}});
  Json edges = Json::array();
  for (const auto& e : g.edges)
    edges.push_back(Json{{"from", g.nodes[e.from].id},
                         {"to", g.nodes[e.to].id},
                         {"weight", e.weight},
                         {"overlap_fraction", e.overlap_fraction}});
  Json events = Json::array();
  for (const auto& e : g.events) {
    Json ev{{"type", tracking::to_string(e.type)}, {"time", e.time}, {"node_ids", e.node_ids}};
    if (e.near_boundary) ev["near_boundary"] = *e.near_boundary;
    events.push_back(ev);
  }
  Json approx = Json::array();
  for (auto c : g.approximate_links) approx.push_back(Json::array({g.times[c], g.times[c + 1]}));
  return Json{{"times", g.times},
              {"nodes", nodes},
              {"edges", edges},
              {"events", events},
              {"approximate_links", approx},
              {"crossings", tracking::count_crossings(g)}};
}

Json neighbors_json(const similarity::NeighborIndex& index) {
  Json nb = Json::object();
  for (const auto& [id, list] : index.neighbors) {
    Json arr = Json::array();
    for (const auto& n : list) arr.push_back(Json::array({n.run_id, n.distance}));
    nb[id] = arr;
  }
  return Json{{"mode", similarity::to_string(index.mode)}, {"k", index.k}, {"neighbors", nb}};
}

similarity::NeighborIndex neighbors_from_json(const Json& j) {
  similarity::NeighborIndex index;
  try {
    index.mode = similarity::mode_from_string(j.at("mode").get<std::string>());
    index.k = j.at("k").get<std::size_t>();
    for (const auto& [id, list] : j.at("neighbors").items()) {
      auto& out = index.neighbors[id];
      for (const auto& n : list) out.push_back({n.at(0).get<std::string>(), n.at(1).get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("neighbor index: ") + e.what());
  }
  return index;
}

Json schema_json(const ParameterSchema& schema) {
  Json cat = Json::object();
  for (const auto& [name, values] : schema.categorical) cat[name] = Json(std::vector<std::string>(values.begin(), values.end()));
  Json num = Json::object();
  for (const auto& [name, r] : schema.numeric) num[name] = Json{{"min", r.min}, {"max", r.max}};
  return Json{{"categorical", cat}, {"numeric", num}};
}

namespace {

Json samples_json(const std::vector<thermo::CurveSample>& s) {
  Json out = Json::array();
  for (const auto& p : s) out.push_back(Json::array({p.temperature, p.pressure}));
  return out;
}

}  // namespace

Json criterion_json(const thermo::MixingLine& line, const thermo::FormationVerdict& verdict,
                    const thermo::CriterionPlot& plot) {
  return Json{{"exhaust", {{"T", line.exhaust.temperature}, {"P_v", line.exhaust.vapor_pressure}}},
              {"ambient", {{"T", line.ambient.temperature}, {"P_v", line.ambient.vapor_pressure}}},
              {"outcome", thermo::to_string(verdict.outcome)},
              {"crossings_liquid", verdict.crossings_liquid},
              {"crossings_ice", verdict.crossings_ice},
              {"curves",
               {{"liquid", samples_json(plot.liquid)},
                {"ice", samples_json(plot.ice)},
                {"mixing_line", samples_json(plot.mixing_line)}}}};
}

thermo::MixingLine mixing_line_from_json(const Json& j) {
  auto point = [&](const char* key) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_object())
      throw Error(ErrorKind::SchemaError, std::string("missing ") + key);
    const auto& p = j.at(key);
    if (!p.contains("T") || !p.contains("P_v") || !p.at("T").is_number() || !p.at("P_v").is_number())
      throw Error(ErrorKind::SchemaError, std::string(key) + " needs numeric T and P_v");
    return StatePoint{p.at("T").get<double>(), p.at("P_v").get<double>()};
  };
  return thermo::MixingLine{point("exhaust"), point("ambient")};
}

Json glyphs_json(const GlyphDiff& d) {
  Json groups = Json::array();
  for (const auto& g : d.groups) groups.push_back(Json{{"run_ids", g.run_ids}, {"values", g.values}});
  return Json{{"diff_attributes", d.diff_attributes}, {"groups", groups}};
}

Json filaments_json(const FilamentSet& f) {
  Json out = Json::object();
  for (const auto& [attr, runs] : f) {
    Json r = Json::object();
    for (const auto& [id, series] : runs) {
      Json s = Json::array();
      for (const auto& p : series) s.push_back(Json{{"time", p.time}, {"value", p.value}, {"relative_change", p.relative_change}});
      r[id] = s;
    }
    out[attr] = Json{{"attribute", attr}, {"runs", r}};
  }
  return out;
}

}  // namespace contrail::artifacts
