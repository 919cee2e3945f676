// Exercises the shared library through its C header only, and the command
// line tool as a subprocess.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <pfde/pfde.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void collect(const char* line, size_t length, void* user) {
  static_cast<std::vector<std::string>*>(user)->emplace_back(line, length);
}

std::string take(char* p) {
  std::string s = p ? p : "";
  pfde_free(p);
  return s;
}

struct Proc {
  int code = -1;
  std::string out;
};

Proc sh(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + PFDE_CLI_PATH + " " + args + " 2>/dev/null";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
  const int status = pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pfde_capi_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("session runs a preset through the callback") {
  pfde_session* s = pfde_session_create();
  REQUIRE(s);
  CHECK(pfde_session_set(s, "preset", "brocard") == PFDE_OK);
  std::vector<std::string> out;
  CHECK(pfde_session_run(s, "solve", collect, &out) == PFDE_OK);
  CHECK(std::string(pfde_last_error()).empty());
  REQUIRE(out.size() == 7);
  CHECK(json::parse(out.back())["found"] == 6);
  pfde_session_destroy(s);
}

TEST_CASE("status codes and last error") {
  pfde_session* s = pfde_session_create();
  CHECK(pfde_session_set(s, "workers", "0") == PFDE_ERR_CONFIG);
  CHECK(std::string(pfde_last_error()).find("workers") != std::string::npos);
  CHECK(pfde_session_set(s, "no-such-key", "1") == PFDE_ERR_CONFIG);
  CHECK(pfde_session_set(nullptr, "eq", "x") == PFDE_ERR_CONFIG);
  CHECK(pfde_session_load_config(s, "/nonexistent/pfde.conf") == PFDE_ERR_CONFIG);
  CHECK(pfde_session_set(s, "eq", "1 * n! = x^2 +") == PFDE_OK);  // parsed lazily
  CHECK(pfde_session_set(s, "bound", "n=0..3") == PFDE_OK);
  CHECK(pfde_session_run(s, "solve", nullptr, nullptr) == PFDE_ERR_CONFIG);
  CHECK(std::string(pfde_last_error()).rfind("syntax", 0) == 0);
  pfde_session_destroy(s);

  s = pfde_session_create();
  pfde_session_set(s, "preset", "brocard");
  pfde_session_set(s, "budget-nodes", "2");
  std::vector<std::string> out;
  CHECK(pfde_session_run(s, "solve", collect, &out) == PFDE_PARTIAL);
  CHECK(json::parse(out.back())["status"] == "partial");
  pfde_session_destroy(s);
}

TEST_CASE("interrupt request stops the next run") {
  pfde_session* s = pfde_session_create();
  pfde_session_set(s, "preset", "brocard");
  pfde_request_interrupt();
  CHECK(pfde_session_run(s, "solve", nullptr, nullptr) == PFDE_PARTIAL);
  pfde_clear_interrupt();
  CHECK(pfde_session_run(s, "solve", nullptr, nullptr) == PFDE_OK);
  pfde_session_destroy(s);
}

TEST_CASE("helper functions") {
  char* text = nullptr;
  REQUIRE(pfde_bhargava_factorial("AP(2,1)", 5, &text) == PFDE_OK);
  CHECK(take(text) == "3840");
  REQUIRE(pfde_radical("-360", &text) == PFDE_OK);
  CHECK(take(text) == "30");
  CHECK(pfde_radical("0", &text) == PFDE_ERR_CONFIG);
  CHECK(pfde_radical("12a", &text) == PFDE_ERR_CONFIG);
  REQUIRE(pfde_legendre_valuation(100, 5, &text) == PFDE_OK);
  CHECK(take(text) == "24");
  CHECK(pfde_legendre_valuation(100, 6, &text) == PFDE_ERR_CONFIG);
  REQUIRE(pfde_parse_equation("2 * n! * m! = x^2*y + x*y^2", &text) == PFDE_OK);
  const auto j = json::parse(take(text));
  CHECK(j.is_object());
  CHECK(pfde_parse_equation("2 * n! = ", &text) == PFDE_ERR_CONFIG);
  CHECK(std::string(pfde_version()).size() > 0);
}

TEST_CASE("cli: solve, exit codes and malformed input") {
  auto p = sh("solve --preset brocard");
  CHECK(p.code == 0);
  CHECK(lines(p.out).size() == 7);
  CHECK(sh("solve --eq '1 * n! = x^^2' --bound n=0..3").code == 2);
  CHECK(sh("solve --bogus").code == 2);
  CHECK(sh("construct --d 2 --r 1").code == 2);
  CHECK(sh("solve --preset brocard --budget-nodes 3").code == 3);
  CHECK(sh("--help").code == 0);
}

TEST_CASE("cli: config precedence is default file, then --config, then flags") {
  const auto dir = scratch("confdir");
  fs::create_directories(dir);
  std::ofstream(dir / "pfde.conf") << "preset = brocard\nbound = n=0..5\n";
  const auto extra = scratch("extra.conf");
  std::ofstream(extra) << "bound = n=0..7\n";
  const std::string env = "PFDE_CONFIG_DIR=" + dir.string();
  auto found = [](const Proc& p) { return json::parse(lines(p.out).back())["found"].get<int>(); };
  CHECK(found(sh("solve", env)) == 4);
  CHECK(found(sh("--config " + extra.string() + " solve", env)) == 6);
  CHECK(found(sh("--config " + extra.string() + " solve --bound n=0..4", env)) == 2);
}

TEST_CASE("cli: workers and resume give byte-identical files") {
  const auto a = scratch("a.jsonl"), b = scratch("b.jsonl"), c = scratch("c.jsonl"), ck = scratch("c.ck");
  REQUIRE(sh("solve --preset xy-sum-7 --workers 1 --out " + a.string()).code == 0);
  REQUIRE(sh("solve --preset xy-sum-7 --workers 8 --out " + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
  const std::string common = "solve --preset xy-sum-7 --checkpoint-every 9 --out " + c.string() +
                             " --checkpoint " + ck.string();
  CHECK(sh(common + " --budget-nodes 30").code == 3);
  CHECK(sh(common + " --resume --workers 8").code == 0);
  CHECK(slurp(a) == slurp(c));
}

TEST_CASE("cli: solve output feeds audit") {
  const auto recs = scratch("recs.jsonl");
  REQUIRE(sh("solve --preset brocard --out " + recs.string()).code == 0);
  const auto p = sh("audit --records " + recs.string());
  CHECK(p.code == 0);
  const auto ls = lines(p.out);
  REQUIRE(ls.size() == 6);
  CHECK(json::parse(ls[4])["metrics"]["z"] == -142);
}
