// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "contrail/error.hpp"
#include "contrail/io.hpp"
#include "contrail/thermo.hpp"

namespace contrail::service {

namespace fs = std::filesystem;
using artifacts::Json;

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const std::size_t j = path.find('/', i);
    const std::size_t end = j == std::string::npos ? path.size() : j;
    if (end > i) parts.push_back(path.substr(i, end - i));
    i = end;
  }
  return parts;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Canonical time label for a URL segment, or the segment itself.
std::string time_key(const std::string& t) {
  const auto v = parse_number(t);
  return v ? format_time(*v) : t;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

FilterSpec parse_filter(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("filter is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::SchemaError, "filter must be a JSON object");
  FilterSpec spec;
  for (const auto& [name, v] : j.items()) {
    if (v.is_string()) {
      spec.categorical[name] = v.get<std::string>();
    } else if (v.is_object()) {
      std::optional<double> lo, hi;
      for (const auto& [k, b] : v.items()) {
        if (!b.is_number()) throw Error(ErrorKind::SchemaError, name + "." + k + " must be a number");
        if (k == "min")
          lo = b.get<double>();
        else if (k == "max")
          hi = b.get<double>();
        else
          throw Error(ErrorKind::SchemaError, name + ": unknown bound " + k);
      }
      if (!lo && !hi) throw Error(ErrorKind::SchemaError, name + ": range needs min or max");
      if (lo && hi && *lo > *hi) throw Error(ErrorKind::SchemaError, name + ": min > max");
      spec.numeric[name] = {lo, hi};
    } else {
      throw Error(ErrorKind::SchemaError, name + ": expected a string or a {min, max} range");
    }
  }
  return spec;
}

Service::Service(const fs::path& bundle_root) : root_(bundle_root) {
  bundle_ = Json::parse(read_text_file(root_ / "bundle.json"));
  for (const auto& [rel, sum] : bundle_.at("checksums").items()) checksums_[rel] = sum.get<std::string>();
  if (bundle_.at("ensemble").contains("schema"))
    schema_ = Json::parse(read_text_file(root_ / bundle_["ensemble"]["schema"].get<std::string>()));
  else
    schema_ = Json{{"categorical", Json::object()}, {"numeric", Json::object()}};

  for (const auto& r : bundle_.at("runs")) {
    RunEntry e;
    const auto id = r.at("run_id").get<std::string>();
    e.ok = r.at("status") == "ok";
    e.descriptor = Json{{"run_id", id}, {"status", r.at("status")}};
    if (e.ok) {
      e.artifacts = r.at("artifacts");
      const auto manifest = read_manifest(root_ / e.artifacts.at("manifest").get<std::string>());
      e.parameters = manifest.all_parameters();
      const auto sums = Json::parse(read_text_file(root_ / e.artifacts.at("summaries").get<std::string>()));
      if (!sums.empty()) e.final_summary = sums.back();
      e.descriptor["grid_kind"] = to_string(manifest.grid_kind);
      e.descriptor["timesteps"] = manifest.timesteps;
      e.descriptor["input_params"] = manifest.input_params;
      e.descriptor["boundary_conditions"] = manifest.boundary_conditions;
    } else {
      e.descriptor["error"] = r.at("error");
    }
    run_order_.push_back(id);
    runs_[id] = std::move(e);
  }
}

Response Service::json_response(const Json& j, int status) const {
  Response r;
  r.status = status;
  r.body = artifacts::dump(j);
  r.etag = quoted(sha256_hex(r.body));
  return r;
}

Response Service::error_response(int status, const std::string& kind, const std::string& detail) const {
  Response r = json_response(Json{{"error", {{"kind", kind}, {"detail", detail}}}}, status);
  r.etag.clear();
  return r;
}

Response Service::file_response(const std::string& rel, const std::string& content_type) const {
  Response r;
  r.content_type = content_type;
  r.body = read_text_file(root_ / rel);
  const auto it = checksums_.find(rel);
  r.etag = quoted(it != checksums_.end() ? it->second : sha256_hex(r.body));
  return r;
}

std::vector<std::string> Service::evaluate_filter(const FilterSpec& spec) const {
  const auto& cat = schema_.at("categorical");
  const auto& num = schema_.at("numeric");
  for (const auto& [name, v] : spec.categorical)
    if (!cat.contains(name)) throw Error(ErrorKind::NotFound, "unknown categorical attribute " + name);
  for (const auto& [name, v] : spec.numeric)
    if (!num.contains(name)) throw Error(ErrorKind::NotFound, "unknown numeric attribute " + name);

  std::vector<std::string> out;
  for (const auto& id : run_order_) {
    const auto& run = runs_.at(id);
    if (!run.ok) continue;
    bool match = true;
    for (const auto& [name, value] : spec.categorical) {
      const auto it = run.parameters.find(name);
      match = match && it != run.parameters.end() && it->second == value;
    }
    for (const auto& [name, range] : spec.numeric) {
      if (!match) break;
      if (!run.final_summary.contains(name)) {
        match = false;
        break;
      }
      const double v = run.final_summary.at(name).get<double>();
      if (range.first && v < *range.first) match = false;
      if (range.second && v > *range.second) match = false;
    }
    if (match) out.push_back(id);
  }
  return out;
}

Response Service::timestep_element(const RunEntry& run, const std::string& key, const std::string& t) const {
  const auto rel = run.artifacts.at(key).get<std::string>();
  const auto arr = Json::parse(read_text_file(root_ / rel));
  const auto want = time_key(t);
  for (const auto& e : arr)
    if (format_time(e.at("time").get<double>()) == want) return json_response(e);
  return error_response(404, "NotFound", "no timestep " + t);
}

Response Service::run_route(const std::string& id, const std::vector<std::string>& rest, const Request& req) const {
  const auto it = runs_.find(id);
  if (it == runs_.end()) return error_response(404, "NotFound", "unknown run " + id);
  const RunEntry& run = it->second;
  if (rest.empty()) return json_response(run.descriptor);
  if (!run.ok) return error_response(404, "NotFound", "run " + id + " failed preprocessing");
  const auto& what = rest[0];
  const auto& art = run.artifacts;

  if (rest.size() == 1) {
    for (const char* key : {"manifest", "summaries", "tracking", "criterion"}) {
      if (what != key) continue;
      if (!art.contains(key)) return error_response(404, "NotFound", std::string("run has no ") + key);
      return file_response(art.at(key).get<std::string>(), "application/json");
    }
    if (what == "shapes" || what == "groups") return file_response(art.at(what).get<std::string>(), "application/json");
  }
  if (rest.size() == 2) {
    const auto& t = rest[1];
    if (what == "shape") return timestep_element(run, "shapes", t);
    if (what == "groups") return timestep_element(run, "groups", t);
    if (what == "labels") {
      const auto key = time_key(t);
      if (!art.at("labels").contains(key)) return error_response(404, "NotFound", "no timestep " + t);
      return file_response(art.at("labels").at(key).get<std::string>(), "text/csv");
    }
    if (what == "volume") {
      const auto key = time_key(t);
      const auto& vol = art.at("volume");
      if (!vol.contains(key)) return error_response(404, "NotFound", "no volume at timestep " + t);
      const auto q = req.query.find("attr");
      if (q == req.query.end()) return error_response(400, "InvalidArgument", "attr query parameter required");
      if (!vol.at(key).contains(q->second)) return error_response(404, "NotFound", "no volume attribute " + q->second);
      return file_response(vol.at(key).at(q->second).get<std::string>(), "application/octet-stream");
    }
  }
  return error_response(404, "NotFound", "unknown resource");
}

Response Service::ensemble_route(const std::vector<std::string>& rest, const Request& req) const {
  const auto& ens = bundle_.at("ensemble");
  if (rest.empty()) return error_response(404, "NotFound", "unknown resource");
  const auto& what = rest[0];

  if (what == "filter" && rest.size() == 1) {
    if (req.method != "POST") return error_response(405, "InvalidArgument", "filter takes POST");
    FilterSpec spec;
    try {
      spec = parse_filter(req.body);
    } catch (const Error& e) {
      return error_response(400, std::string(to_string(e.kind())), e.detail());
    }
    try {
      const auto ids = evaluate_filter(spec);
      return json_response(Json{{"run_ids", ids}, {"count", ids.size()}});
    } catch (const Error& e) {
      return error_response(422, std::string(to_string(e.kind())), e.detail());
    }
  }
  if (req.method != "GET") return error_response(405, "InvalidArgument", "GET only");

  if ((what == "schema" || what == "glyphs" || what == "quality") && rest.size() == 1) {
    if (!ens.contains(what)) return error_response(404, "NotFound", "bundle has no " + what);
    return file_response(ens.at(what).get<std::string>(), "application/json");
  }
  if (what == "filaments" && rest.size() == 1) {
    if (!ens.contains("filaments")) return error_response(404, "NotFound", "bundle has no filaments");
    const auto q = req.query.find("attr");
    if (q == req.query.end()) return file_response(ens.at("filaments").get<std::string>(), "application/json");
    const auto all = Json::parse(read_text_file(root_ / ens.at("filaments").get<std::string>()));
    if (!all.contains(q->second)) return error_response(404, "NotFound", "no filaments for " + q->second);
    return json_response(all.at(q->second));
  }
  if (what == "similar" && rest.size() == 2) {
    const auto q = req.query.find("mode");
    const std::string mode = q == req.query.end() ? "parameters" : q->second;
    if (mode != "parameters" && mode != "shape" && mode != "hausdorff")
      return error_response(400, "InvalidArgument", "mode must be parameters, shape or hausdorff");
    if (!runs_.count(rest[1])) return error_response(404, "NotFound", "unknown run " + rest[1]);
    if (!ens.contains("neighbors") || !ens["neighbors"].contains(mode))
      return error_response(404, "NotFound", "no " + mode + " index in this bundle");
    const auto idx = Json::parse(read_text_file(root_ / ens["neighbors"][mode].get<std::string>()));
    if (!idx.at("neighbors").contains(rest[1]))
      return error_response(404, "NotFound", "run " + rest[1] + " is not in the " + mode + " index");
    return json_response(
        Json{{"run_id", rest[1]}, {"mode", mode}, {"k", idx.at("k")}, {"neighbors", idx.at("neighbors").at(rest[1])}});
  }
  return error_response(404, "NotFound", "unknown resource");
}

Response Service::criterion_route(const Request& req) const {
  if (req.method != "POST") return error_response(405, "InvalidArgument", "criterion takes POST");
  Json j;
  try {
    j = Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "SchemaError", e.what());
  }
  try {
    const auto line = artifacts::mixing_line_from_json(j);
    int samples = 512;
    if (j.contains("samples")) {
      if (!j["samples"].is_number_integer() || j["samples"].get<int>() < 2)
        return error_response(400, "SchemaError", "samples must be an integer >= 2");
      samples = j["samples"].get<int>();
    }
    const thermo::SaturationModel model;
    const auto verdict = thermo::classify_mixing_line(model, line, samples);
    return json_response(artifacts::criterion_json(line, verdict, thermo::sample_curves(model, line)));
  } catch (const Error& e) {
    const int status = e.kind() == ErrorKind::SchemaError ? 400 : 422;
    return error_response(status, std::string(to_string(e.kind())), e.detail());
  }
}

Response Service::handle(const Request& req) const {
  Response r;
  try {
    const auto parts = split_path(req.path);
    if (parts.empty()) {
      r = error_response(404, "NotFound", "unknown resource");
    } else if (parts[0] == "criterion" && parts.size() == 1) {
      r = criterion_route(req);
    } else if (parts[0] == "ensemble") {
      r = ensemble_route({parts.begin() + 1, parts.end()}, req);
    } else if (req.method != "GET") {
      r = error_response(405, "InvalidArgument", "GET only");
    } else if (parts[0] == "runs" && parts.size() == 1) {
      Json list = Json::array();
      for (const auto& id : run_order_) list.push_back(runs_.at(id).descriptor);
      r = json_response(list);
    } else if (parts[0] == "runs") {
      r = run_route(parts[1], {parts.begin() + 2, parts.end()}, req);
    } else if (parts[0] == "bundle" && parts.size() == 1) {
      r = file_response("bundle.json", "application/json");
      r.etag = quoted(sha256_hex(r.body));
    } else {
      r = error_response(404, "NotFound", "unknown resource");
    }
  } catch (const Error& e) {
    r = error_response(e.kind() == ErrorKind::IoError ? 404 : 500, std::string(to_string(e.kind())), e.detail());
  } catch (const std::exception& e) {
    r = error_response(500, "InternalError", e.what());
  }
  if (r.status == 200 && !r.etag.empty() && req.if_none_match && *req.if_none_match == r.etag) {
    r.status = 304;
    r.body.clear();
  }
  return r;
}

void mount(httplib::Server& server, std::shared_ptr<const Service> service) {
  auto to_request = [](const httplib::Request& hr, const std::string& method) {
    Request r;
    r.method = method;
    r.path = hr.path.substr(std::string(kApiPrefix).size());
    for (const auto& [k, v] : hr.params) r.query.emplace(k, v);
    r.body = hr.body;
    if (hr.has_header("If-None-Match")) r.if_none_match = hr.get_header_value("If-None-Match");
    return r;
  };
  auto reply = [](const Response& resp, httplib::Response& hr) {
    hr.status = resp.status;
    if (!resp.etag.empty()) hr.set_header("ETag", resp.etag);
    hr.set_header("Cache-Control", "no-cache");
    hr.set_header("Vary", "Accept-Encoding");
    if (resp.status != 304) hr.set_content(resp.body, resp.content_type);
  };
  const std::string pattern = std::string(kApiPrefix) + "/.*";
  server.Get(pattern, [service, to_request, reply](const httplib::Request& hr, httplib::Response& res) {
    reply(service->handle(to_request(hr, "GET")), res);
  });
  server.Post(pattern, [service, to_request, reply](const httplib::Request& hr, httplib::Response& res) {
    reply(service->handle(to_request(hr, "POST")), res);
  });
  server.Options(pattern, [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, If-None-Match");
    res.set_header("Access-Control-Expose-Headers", "ETag");
  });
}

void serve(const fs::path& bundle_root, const std::string& host, int port) {
  auto service = std::make_shared<const Service>(bundle_root);
  httplib::Server server;
  mount(server, service);
  if (!server.listen(host, port)) throw Error(ErrorKind::IoError, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace contrail::service
