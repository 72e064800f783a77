#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using json = nlohmann::json;

namespace {

// Tests run from the build directory, next to the binary.
const char* kBinary = "./agora";

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(kBinary) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe))
    r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path tmp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_fn28(const std::filesystem::path& path) {
  std::ofstream f(path);
  for (int i = 0; i < 4; ++i)
    f << R"({"participant": "v)" << i << R"(", "ranking": ["a","b","c"]})"
      << "\n";
  for (int i = 4; i < 6; ++i)
    f << R"({"participant": "v)" << i << R"(", "ranking": ["b","c","a"]})"
      << "\n";
  f << R"({"participant": "v6", "ranking": ["c","b","a"]})" << "\n";
}

}  // namespace

TEST_CASE("vote --rule borda reports the fn28 scores") {
  auto path = tmp_path("cli_fn28.jsonl");
  write_fn28(path);
  auto r = run("vote --rule borda --in " + path.string());
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j["result"]["winner"] == "b");
  CHECK(j["result"]["scores"]["a"] == 8.0);
  CHECK(j["result"]["scores"]["b"] == 9.0);
  CHECK(j["result"]["scores"]["c"] == 4.0);
  CHECK(j["manifest"]["command"] == "vote");

  auto p = run("vote --rule plurality --in " + path.string());
  REQUIRE(p.exit_code == 0);
  auto pj = json::parse(p.out);
  CHECK(pj["result"]["winner"] == "a");
  CHECK(pj["result"]["scores"]["a"] == 4.0);
}

TEST_CASE("reproduce cases succeed and carry their headline facts") {
  for (const std::string c : {"fn13", "fn18", "fn28", "fn29", "fn18-caveat"}) {
    auto r = run("reproduce " + c);
    CHECK(r.exit_code == 0);
  }
  auto fn18 = json::parse(run("reproduce fn18").out);
  CHECK(fn18["ranking"][0]["statement"] == "B");
  CHECK(fn18["ranking"][0]["score"] == 0.3);
  auto caveat = json::parse(run("reproduce fn18-caveat").out);
  CHECK(caveat["ranking"][0]["statement"] == "tiny");
  CHECK(caveat["ranking"][0]["score"] == 1.0);
  auto fn29 = json::parse(run("reproduce fn29").out);
  CHECK(fn29["cycle"] == true);
}

TEST_CASE("exit codes: 0 success, 1 domain error, 2 usage error") {
  CHECK(run("reproduce fn28").exit_code == 0);
  CHECK(run("reproduce nonsense").exit_code == 1);   // DomainError: BadSpec
  CHECK(run("frobnicate").exit_code == 2);           // unknown subcommand
  CHECK(run("vote --rule borda").exit_code == 2);    // missing --in
  CHECK(run("vote --rule banana --in x").exit_code == 2);
  CHECK(run("vote --rule borda --in /no/such/file").exit_code == 1);
}

TEST_CASE("synth -> ingest -> cluster round trip with manifests") {
  auto dir = tmp_path("cli_synth");
  std::filesystem::remove_all(dir);
  auto r = run("synth --n 40 --m 20 --d 2 --density 0.6 --clusters "
               "\"2x20@(-1,0);(1,0)\" --seed 9 --out " +
               dir.string());
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j["n_participants"] == 40);
  CHECK(j["n_votes"] == 40 * 20 * 6 / 10);
  CHECK(j["manifest"]["outputs"].size() == 4);  // 3 JSONL + world.json

  auto ing = run("ingest --in " + dir.string());
  REQUIRE(ing.exit_code == 0);
  auto ij = json::parse(ing.out);
  CHECK(ij["n_votes"] == j["n_votes"]);
  CHECK(ij["tallies"].size() == 20);

  auto cl = run("cluster --in " + dir.string() + " --kmax 4 --seed 3");
  REQUIRE(cl.exit_code == 0);
  auto cj = json::parse(cl.out);
  CHECK(cj["groups"]["k"].get<int>() >= 2);
  CHECK(cj["groups"]["assignment"].size() == 40);

  // Determinism: identical reports for identical invocations.
  auto cl2 = run("cluster --in " + dir.string() + " --kmax 4 --seed 3");
  CHECK(cl.out == cl2.out);
}

TEST_CASE("slate command runs the greedy rule with a rating check") {
  auto path = tmp_path("cli_util.jsonl");
  {
    std::ofstream f(path);
    f << R"({"participant":"p0","statement":"sa","utility":0.9})" << "\n";
    f << R"({"participant":"p0","statement":"sb","utility":0.5})" << "\n";
    f << R"({"participant":"p1","statement":"sa","utility":0.1})" << "\n";
    f << R"({"participant":"p1","statement":"sb","utility":0.8})" << "\n";
  }
  auto r = run("slate --k 1 --utilities " + path.string() + " --check rating");
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j["selected"] == json::array({"sb"}));
  CHECK(j["check"]["satisfied"] == true);
}

TEST_CASE("pipeline writes a trace and reports dispersion contraction") {
  auto dir = tmp_path("cli_synth");  // created by the earlier case if ordered;
  if (!std::filesystem::exists(dir)) {
    REQUIRE(run("synth --n 40 --m 20 --d 2 --density 0.6 --clusters "
                "\"2x20@(-1,0);(1,0)\" --seed 9 --out " +
                dir.string())
                .exit_code == 0);
  }
  auto trace_path = tmp_path("cli_trace.json");
  auto r = run("pipeline --rounds 2 --candidates 4 --top 3 --eta 0.5 --seed 1 "
               "--world " +
               (dir / "world.json").string() + " --trace " +
               trace_path.string());
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j["rounds"].size() == 2);
  for (const auto& round : j["rounds"]) {
    const double before = round["dispersion_before"].get<double>();
    const double after = round["dispersion_after"].get<double>();
    CHECK(std::abs(after - 0.5 * before) < 1e-9);
  }
  auto trace = json::parse(std::ifstream(trace_path));
  CHECK(trace["rounds"].size() == 2);
  CHECK(trace["config"]["eta"] == 0.5);
}

TEST_CASE("pretty mode renders text, report flag writes JSON") {
  auto report = tmp_path("cli_report.json");
  auto r = run("reproduce fn28 --pretty --report " + report.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("all assertions hold") != std::string::npos);
  auto j = json::parse(std::ifstream(report));
  CHECK(j["borda"]["scores"]["b"] == 9.0);
  CHECK(j["manifest"]["command"] == "reproduce");
}
