#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "runner.hpp"

using namespace pfde;
using namespace pfde::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::vector<std::string> lines;
  std::string error;
};

Run run(const std::string& command, const RunConfig& c) {
  Run r;
  r.code = run_command(command, c, [&](const std::string& s) { r.lines.push_back(s); }, r.error);
  return r;
}

RunConfig config(std::initializer_list<std::pair<std::string, std::string>> kv) {
  RunConfig c;
  for (const auto& [k, v] : kv) apply_option(c, k, v);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pfde_runner_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

}  // namespace

TEST_CASE("options parse and validate") {
  RunConfig c;
  apply_option(c, "bound", "n=0..10");
  apply_option(c, "bound", "y = -3..3");
  CHECK(c.bounds.at("n").hi == 10);
  CHECK(c.bounds.at("y").lo == -3);
  apply_option(c, "budget_nodes", "5");
  CHECK(*c.budget_nodes == 5);
  apply_option(c, "stirling", "3,4,5");
  CHECK(c.stirling.back() == std::vector<std::uint64_t>{3, 4, 5});
  apply_option(c, "r", "3");
  CHECK(c.bases == std::vector<std::uint64_t>{1, 1, 1});
  CHECK_THROWS_AS(apply_option(c, "bound", "n=5..1"), Error);
  CHECK_THROWS_AS(apply_option(c, "bound", "n"), Error);
  CHECK_THROWS_AS(apply_option(c, "workers", "0"), Error);
  CHECK_THROWS_AS(apply_option(c, "workers", "two"), Error);
  CHECK_THROWS_AS(apply_option(c, "format", "xml"), Error);
  CHECK_THROWS_AS(apply_option(c, "colour", "red"), Error);
  CHECK_THROWS_AS(apply_option(c, "resume", "maybe"), Error);
}

TEST_CASE("config files skip comments and report bad lines") {
  const auto p = scratch("good.conf");
  std::ofstream(p) << "# defaults\n\nworkers = 3\nbound = n=0..4\n";
  const auto kv = read_config_file(p.string());
  REQUIRE(kv.size() == 2);
  CHECK(kv[0] == std::make_pair(std::string("workers"), std::string("3")));
  CHECK(kv[1].second == "n=0..4");
  const auto bad = scratch("bad.conf");
  std::ofstream(bad) << "workers 3\n";
  CHECK_THROWS_AS(read_config_file(bad.string()), Error);
  CHECK_THROWS_AS(read_config_file(scratch("missing.conf").string()), Error);
}

TEST_CASE("every preset parses and has bounds for its left-hand side") {
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    const auto eq = model::parse_equation(p.equation);
    solver::SearchBounds sb;
    sb.ranges = p.bounds;
    CHECK_NOTHROW(solver::TupleSpace::for_lhs(eq.lhs, sb));
    CHECK_NOTHROW(solver::make_solver(eq, sb));
    CHECK(find_preset(p.name) == &p);
  }
  CHECK(find_preset("no-such-preset") == nullptr);
}

TEST_CASE("solve streams records then a summary") {
  const auto r = run("solve", config({{"preset", "brocard"}}));
  REQUIRE(r.code == kComplete);
  REQUIRE(r.lines.size() == 7);
  const auto s = json::parse(r.lines.back());
  CHECK(s["kind"] == "summary");
  CHECK(s["found"] == 6);
  CHECK(s["status"] == "complete");
  CHECK(json::parse(r.lines[0])["assignment"]["n"] == 4);
}

TEST_CASE("configuration errors exit 2 with a message") {
  auto r = run("solve", config({{"eq", "1 * n! = x^^2"}, {"bound", "n=0..3"}}));
  CHECK(r.code == kConfigError);
  CHECK(r.error.find("position") != std::string::npos);
  r = run("solve", config({{"eq", "1 * n! = x^2"}}));
  CHECK(r.code == kConfigError);
  r = run("solve", config({{"eq", "1 * n! = x^2"}, {"preset", "brocard"}}));
  CHECK(r.code == kConfigError);
  r = run("solve", config({{"preset", "nope"}}));
  CHECK(r.code == kConfigError);
  r = run("construct", config({{"d", "2"}, {"r", "1"}}));
  CHECK(r.code == kConfigError);
  CHECK(r.error.find("hypothesis") == 0);
  r = run("frobnicate", RunConfig{});
  CHECK(r.code == kConfigError);
  r = run("audit", RunConfig{});
  CHECK(r.code == kConfigError);
}

TEST_CASE("worker count does not change the output") {
  for (const char* preset : {"xy-sum", "xy-diff-7", "takeda-sum-squares", "erdos-oblath-sum", "ulas-2nn-square"}) {
    CAPTURE(preset);
    auto one = config({{"preset", preset}, {"checkpoint-every", "5"}});
    auto eight = one;
    eight.workers = 8;
    const auto a = run("solve", one);
    const auto b = run("solve", eight);
    REQUIRE(a.code == kComplete);
    CHECK(a.lines == b.lines);
  }
}

TEST_CASE("node budget then resume reproduces the full output byte for byte") {
  const auto full = scratch("full.jsonl");
  const auto part = scratch("part.jsonl");
  const auto ck = scratch("part.ck");
  auto base = config({{"preset", "takeda-cubic"}, {"checkpoint-every", "3"}});
  auto c = base;
  c.out = full.string();
  REQUIRE(run("solve", c).code == kComplete);

  for (std::uint64_t budget : {1, 4, 7}) {
    CAPTURE(budget);
    c = base;
    c.out = part.string();
    c.checkpoint = ck.string();
    c.budget_nodes = budget;
    int code = run("solve", c).code;
    CHECK(code == kPartial);
    c.resume = true;
    int rounds = 0;
    while (code == kPartial && rounds++ < 100) code = run("solve", c).code;
    CHECK(code == kComplete);
    CHECK(slurp(part) == slurp(full));
    fs::remove(ck);
  }
}

TEST_CASE("resume refuses a missing or foreign checkpoint") {
  const auto out = scratch("r.jsonl");
  const auto ck = scratch("r.ck");
  auto c = config({{"preset", "brocard"}, {"budget-nodes", "3"}, {"checkpoint-every", "2"}});
  c.out = out.string();
  c.checkpoint = ck.string();
  c.resume = true;
  CHECK(run("solve", c).code == kConfigError);  // no checkpoint yet
  c.resume = false;
  REQUIRE(run("solve", c).code == kPartial);
  auto other = c;
  other.bounds["n"] = {0, 9};
  other.resume = true;
  const auto r = run("solve", other);
  CHECK(r.code == kConfigError);
  CHECK(r.error.find("checkpoint") != std::string::npos);
  auto nocheck = config({{"preset", "brocard"}, {"checkpoint", ck.string()}});
  CHECK(run("solve", nocheck).code == kConfigError);  // --checkpoint without --out
}

TEST_CASE("scan resume matches an uninterrupted scan") {
  const auto a = scratch("scan_a.jsonl");
  const auto b = scratch("scan_b.jsonl");
  const auto ck = scratch("scan.ck");
  auto c = config({{"limit", "5000"}, {"witnesses", "10"}});
  c.out = a.string();
  REQUIRE(run("scan-brocard", c).code == kComplete);
  c.out = b.string();
  c.checkpoint = ck.string();
  c.checkpoint_every = 700;
  c.budget_nodes = 1000;
  int code = run("scan-brocard", c).code;
  CHECK(code == kPartial);
  c.resume = true;
  while (code == kPartial) code = run("scan-brocard", c).code;
  CHECK(code == kComplete);
  CHECK(slurp(a) == slurp(b));
  const auto report = json::parse(slurp(a).substr(0, slurp(a).find('\n')));
  CHECK(report["confirmed"] == json::array({4, 5, 7}));
}

TEST_CASE("interrupt flag stops a run as partial") {
  interrupt_flag() = true;
  const auto r = run("solve", config({{"preset", "brocard"}}));
  interrupt_flag() = false;
  CHECK(r.code == kPartial);
  CHECK(json::parse(r.lines.back())["tuples_examined"] == 0);
}

TEST_CASE("construct emits a verified record") {
  const auto r = run("construct", config({{"d", "2"}, {"r", "2"}, {"t", "1"}}));
  REQUIRE(r.code == kComplete);
  const auto j = json::parse(r.lines.at(0));
  CHECK(j["verified"] == true);
  CHECK(j["assignment"]["x"] == 12);
  const auto f = run("construct", config({{"form", "x^2 + y^2"}, {"r", "2"}}));
  REQUIRE(f.code == kComplete);
  CHECK(json::parse(f.lines.at(0))["certificate"]["route"] == "diagonal");
}

TEST_CASE("bhargava table in both formats") {
  auto c = config({{"set", "AP(3,1)"}, {"bound", "n=0..4"}});
  auto r = run("bhargava", c);
  REQUIRE(r.lines.size() == 5);
  CHECK(json::parse(r.lines[4])["value"] == 81 * 24);
  c.format = "csv";
  r = run("bhargava", c);
  REQUIRE(r.lines.size() == 6);
  CHECK(r.lines[0] == "n,value");
  CHECK(r.lines[3] == "2,18");
}

TEST_CASE("audit over solver output") {
  const auto recs = scratch("recs.jsonl");
  auto s = config({{"preset", "brocard"}});
  s.out = recs.string();
  REQUIRE(run("solve", s).code == kComplete);
  auto c = config({{"records", recs.string()}, {"stirling", "2"}, {"finsler", "100"}});
  const auto r = run("audit", c);
  REQUIRE(r.code == kComplete);
  REQUIRE(r.lines.size() == 8);  // 6 records, summary skipped, then finsler and stirling
  CHECK(json::parse(r.lines[0])["kind"] == "instrument_solution");
  CHECK(json::parse(r.lines[6])["kind"] == "finsler_sweep");
  CHECK(json::parse(r.lines[6])["holds"] == true);
  CHECK(json::parse(r.lines[7])["holds"] == false);  // the bound fails at n = 2
}

TEST_CASE("prune-test reports soundness") {
  const auto r = run("prune-test", config({{"eq", "1 * n! = x^2"}, {"bound", "n=0..40"}}));
  REQUIRE(r.code == kComplete);
  const auto s = json::parse(r.lines.back());
  CHECK(s["sound"] == true);
  CHECK(s["identical"] == true);
  CHECK(s["pruned"].get<int>() >= 38);
}

TEST_CASE("fnv1a known values") {
  CHECK(fnv1a("") == 14695981039346656037ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
