// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <httplib.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "contrail/artifacts.hpp"
#include "contrail/io.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using contrail::artifacts::Json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "contrail");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = contrail::cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

// One small ensemble and bundle shared by the cases below.
struct Fixture {
  test_util::TempDir dir;
  fs::path ensemble = dir.path() / "ens";
  fs::path bundle = dir.path() / "bundle";
  Fixture() {
    REQUIRE(run({"generate", "--out", ensemble.string(), "--preset", "small", "--particles", "2000", "--seed", "9"}).code == 0);
    contrail::write_text_file(dir.path() / "pc.json", R"({"grid_dims": [16, 8, 8], "threads": 1})");
    const auto r = run({"preprocess", "--ensemble", ensemble.string(), "--out", bundle.string(), "--config",
                        (dir.path() / "pc.json").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("usage errors exit 2, help exits 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"generate", "--out", "x", "--bogus"}).code == 2);
  CHECK(run({"generate", "--out", "x", "--preset", "huge"}).code == 2);
  CHECK(run({"similar", "--id", "a", "--mode", "colour"}).code == 2);
  const auto h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("preprocess") != std::string::npos);
  CHECK(run({"shape", "--help"}).code == 0);
}

TEST_CASE("failures exit 1 with a JSON error line") {
  test_util::TempDir tmp;
  const auto r = run({"summarize", "--run", tmp.path().string()});
  CHECK(r.code == 1);
  const auto j = Json::parse(r.err);
  CHECK(j["error"]["kind"].is_string());
  CHECK(j["error"]["detail"].is_string());

  const auto c = run({"criterion", "--exhaust-t", "580"});
  CHECK(c.code == 1);
  CHECK(Json::parse(c.err)["error"]["kind"] == "InvalidArgument");
}

TEST_CASE("generate reports its seed and writes ground truth") {
  auto& f = fixture();
  CHECK(fs::exists(f.ensemble / "ground_truth.json"));
  test_util::TempDir tmp;
  const auto r = run({"generate", "--out", (tmp.path() / "e").string(), "--preset", "small", "--particles", "500", "--seed", "42"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["seed"] == 42);
}

TEST_CASE("per-run analysis commands") {
  auto& f = fixture();
  const auto rd = (f.ensemble / "run-01").string();
  const auto s = run({"summarize", "--run", rd});
  REQUIRE(s.code == 0);
  const auto sj = Json::parse(s.out);
  CHECK(sj.size() > 1);
  CHECK(sj[0].contains("mean_temperature"));

  test_util::TempDir tmp;
  const auto svg = tmp.path() / "b.svg";
  const auto sh = run({"shape", "--run", rd, "--dump-svg", svg.string()});
  REQUIRE(sh.code == 0);
  CHECK(Json::parse(sh.out)["boundary"].size() >= 3);
  CHECK(contrail::read_text_file(svg).find("<polygon") != std::string::npos);

  const auto g = run({"groups", "--run", rd, "--time", "0.5", "--eps", "0.8"});
  REQUIRE(g.code == 0);
  CHECK(Json::parse(g.out)["eps"] == 0.8);
  CHECK(run({"groups", "--run", rd, "--time", "999"}).code == 1);

  const auto t = run({"track", "--run", rd});
  REQUIRE(t.code == 0);
  CHECK(Json::parse(t.out).contains("events"));

  const auto grid = tmp.path() / "t.grid";
  const auto ra = run({"rasterize", "--run", rd, "--attr", "temperature", "--grid-dims", "8", "8", "8", "--out", grid.string()});
  REQUIRE(ra.code == 0);
  CHECK(fs::file_size(grid) > 8 * 8 * 8 * 4);
}

TEST_CASE("criterion from flags and from a file agree") {
  test_util::TempDir tmp;
  const auto in = tmp.path() / "c.json";
  contrail::write_text_file(in, R"({"exhaust": {"T": 580, "P_v": 5000}, "ambient": {"T": 215, "P_v": 3}})");
  const auto a = run({"criterion", "--input", in.string()});
  const auto b = run({"criterion", "--exhaust-t", "580", "--exhaust-pv", "5000", "--ambient-t", "215", "--ambient-pv", "3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(Json::parse(a.out)["outcome"].is_string());
}

TEST_CASE("similar prints the persisted neighbours") {
  auto& f = fixture();
  const auto r = run({"similar", "--id", "run-01", "--mode", "shape", "--bundle", f.bundle.string()});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  // The small preset has 5 runs, so each member has 4 neighbours.
  CHECK(j["neighbors"].size() == 4);
  CHECK(run({"similar", "--id", "run-99", "--bundle", f.bundle.string()}).code == 1);
}

TEST_CASE("preprocess honours the artifact root environment variable") {
  auto& f = fixture();
  test_util::TempDir tmp;
  ::setenv("CONTRAIL_ARTIFACT_ROOT", tmp.path().c_str(), 1);
  const auto r = run({"preprocess", "--ensemble", f.ensemble.string(), "--grid-dims", "8", "8", "8", "--threads", "1"});
  ::unsetenv("CONTRAIL_ARTIFACT_ROOT");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(tmp.path() / "bundle.json"));
}

TEST_CASE("serve binary answers the run listing") {
  auto& f = fixture();
  const int port = free_port();
  const std::string bind = "127.0.0.1:" + std::to_string(port);
  const pid_t pid = ::fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    ::execl(CONTRAIL_EXE, CONTRAIL_EXE, "serve", "--bundle", f.bundle.c_str(), "--bind", bind.c_str(), nullptr);
    ::_exit(127);
  }
  httplib::Client cli("127.0.0.1", port);
  httplib::Result res;
  for (int i = 0; i < 100 && !res; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    res = cli.Get("/api/v1/runs");
  }
  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(Json::parse(res->body).size() == 5);
}
