// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Read-only HTTP API over a preprocessed bundle, mounted under /api/v1.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "contrail/artifacts.hpp"

namespace httplib {
class Server;
}

namespace contrail::service {

inline constexpr const char* kApiPrefix = "/api/v1";

struct Request {
  std::string method = "GET";
  std::string path;  // without the API prefix
  std::map<std::string, std::string> query;
  std::string body;
  std::optional<std::string> if_none_match;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::string etag;  // quoted
};

/// Categorical predicates (attribute = value) and numeric ranges over
/// final-timestep summary attributes, combined conjunctively.
struct FilterSpec {
  std::map<std::string, std::string> categorical;
  std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> numeric;
};

/// Parses {"attr": "value", "num_attr": {"min": lo, "max": hi}, ...}.
/// Throws Error(SchemaError) on malformed input.
FilterSpec parse_filter(const std::string& body);

class Service {
 public:
  /// Loads bundle.json and the small JSON artifacts; grids are read on demand.
  explicit Service(const std::filesystem::path& bundle_root);

  Response handle(const Request& request) const;

  /// Run ids matching the spec; throws Error(NotFound) naming an attribute
  /// missing from the schema.
  std::vector<std::string> evaluate_filter(const FilterSpec& spec) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  struct RunEntry {
    artifacts::Json descriptor;
    bool ok = false;
    std::map<std::string, std::string> parameters;
    artifacts::Json artifacts;
    artifacts::Json final_summary;
  };

  Response file_response(const std::string& rel, const std::string& content_type) const;
  Response json_response(const artifacts::Json& j, int status = 200) const;
  Response error_response(int status, const std::string& kind, const std::string& detail) const;
  Response run_route(const std::string& id, const std::vector<std::string>& rest, const Request& req) const;
  Response ensemble_route(const std::vector<std::string>& rest, const Request& req) const;
  Response criterion_route(const Request& req) const;
  Response timestep_element(const RunEntry& run, const std::string& key, const std::string& t) const;

  std::filesystem::path root_;
  artifacts::Json bundle_;
  std::map<std::string, RunEntry> runs_;
  std::vector<std::string> run_order_;
  artifacts::Json schema_;
  std::map<std::string, std::string> checksums_;
};

/// Mounts the service on an httplib server: CORS on every response, ETag /
/// If-None-Match, gzip for JSON when the client accepts it.
void mount(httplib::Server& server, std::shared_ptr<const Service> service);

/// Blocks serving `bundle_root` on host:port.
void serve(const std::filesystem::path& bundle_root, const std::string& host, int port);

}  // namespace contrail::service
