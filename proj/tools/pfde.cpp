// Command-line front end. Everything goes through the C API in pfde/pfde.h.

#include <pfde/pfde.h>

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

namespace {

using Settings = std::vector<std::pair<std::string, std::string>>;

void on_sigint(int) { pfde_request_interrupt(); }

void print_line(const char* line, size_t length, void*) {
  std::fwrite(line, 1, length, stdout);
  std::fputc('\n', stdout);
}

// Flags are recorded in command-line order and replayed into the session
// after the config files, so they take precedence.
void value(CLI::App* app, Settings& s, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::vector<std::string>>(
         flag,
         [&s, key](const std::vector<std::string>& vs) {
           for (const auto& v : vs) s.emplace_back(key, v);
         },
         help)
      ->type_name("TEXT");
}

void flag(CLI::App* app, Settings& s, const std::string& name, const std::string& key, const std::string& v,
          const std::string& help) {
  app->add_flag_callback(name, [&s, key, v] { s.emplace_back(key, v); }, help);
}

void run_options(CLI::App* sub, Settings& s) {
  value(sub, s, "--workers", "workers", "worker threads (default 1)");
  value(sub, s, "--out", "out", "write results to this file instead of stdout");
  value(sub, s, "--checkpoint", "checkpoint", "checkpoint file, rewritten atomically");
  flag(sub, s, "--resume", "resume", "true", "continue from --checkpoint");
  value(sub, s, "--budget-seconds", "budget-seconds", "wall-clock budget for this invocation");
  value(sub, s, "--budget-nodes", "budget-nodes", "tuple (or n) budget for this invocation");
  value(sub, s, "--checkpoint-every", "checkpoint-every", "units of work between checkpoints");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solve, construct and audit factorial-product Diophantine equations."};
  app.set_version_flag("--version", pfde_version());
  app.require_subcommand(1);
  Settings settings;
  std::string config_file;
  app.add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);

  auto* solve = app.add_subcommand("solve", "enumerate solutions in a bounded box");
  value(solve, settings, "--eq", "eq", "equation, e.g. \"1 * n! = x^2 - 1\"");
  value(solve, settings, "--preset", "preset", "named equation from the corpus");
  value(solve, settings, "--bound", "bound", "VAR=LO..HI (repeatable)");
  value(solve, settings, "--format", "format", "jsonl or csv");
  flag(solve, settings, "--no-prune", "prune", "false", "disable certificate pruning");
  run_options(solve, settings);

  auto* scan = app.add_subcommand("scan-brocard", "modular sieve for n! + 1 = x^2");
  value(scan, settings, "--limit", "limit", "largest n to scan");
  value(scan, settings, "--witnesses", "witnesses", "number of witness primes (default 25)");
  run_options(scan, settings);

  auto* construct = app.add_subcommand("construct", "explicit infinite families");
  value(construct, settings, "--b", "b", "coefficient b (default 1)");
  value(construct, settings, "--bases", "bases", "factorial bases A_1,...,A_r");
  value(construct, settings, "--r", "r", "number of factorials, all with base 1");
  value(construct, settings, "--d", "d", "power d (default 2)");
  value(construct, settings, "--t", "t", "family parameter t >= 1");
  value(construct, settings, "--form", "form", "binary form, e.g. \"x^2 + y^2\"");
  value(construct, settings, "--route", "route", "auto, diagonal, x=sy or y=sx");
  value(construct, settings, "--ratio", "ratio", "proportion s of the route");
  value(construct, settings, "--out", "out", "output file");

  auto* audit = app.add_subcommand("audit", "abc qualities and factorial bounds");
  value(audit, settings, "--triples", "triples", "file of \"a b c\" lines");
  value(audit, settings, "--records", "records", "solution JSONL (\"-\" for stdin)");
  value(audit, settings, "--finsler", "finsler", "check the primorial bound for 2 <= n <= N");
  value(audit, settings, "--stirling", "stirling", "comma list n_1,...,n_r");
  value(audit, settings, "--stirling-r", "stirling-r", "threshold search for r factorials");
  value(audit, settings, "--decay", "decay", "left-hand side whose radical ratio is tracked");
  value(audit, settings, "--limit", "limit", "range for --stirling-r and --decay");
  value(audit, settings, "--out", "out", "output file");

  auto* bhargava = app.add_subcommand("bhargava", "generalized factorials n!_S");
  value(bhargava, settings, "--set", "set", "Z, AP(a,b) or {s_0,s_1,...}");
  value(bhargava, settings, "--bound", "bound", "n=LO..HI");
  value(bhargava, settings, "--format", "format", "jsonl or csv");
  value(bhargava, settings, "--out", "out", "output file");

  auto* prune = app.add_subcommand("prune-test", "compare pruned and unpruned searches");
  value(prune, settings, "--eq", "eq", "equation");
  value(prune, settings, "--preset", "preset", "named equation");
  value(prune, settings, "--bound", "bound", "VAR=LO..HI (repeatable)");
  value(prune, settings, "--workers", "workers", "worker threads");
  value(prune, settings, "--out", "out", "output file");

  app.add_subcommand("presets", "list the equation corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : PFDE_ERR_CONFIG;
  }

  pfde_session* session = pfde_session_create();
  if (!session) {
    std::fprintf(stderr, "pfde: %s\n", pfde_last_error());
    return PFDE_ERR_INTERNAL;
  }
  auto fail = [&](pfde_status st) {
    std::fprintf(stderr, "pfde: %s\n", pfde_last_error());
    pfde_session_destroy(session);
    return static_cast<int>(st);
  };

  if (const char* dir = std::getenv("PFDE_CONFIG_DIR"); dir && *dir) {
    const auto path = std::filesystem::path(dir) / "pfde.conf";
    if (std::filesystem::exists(path)) {
      if (auto st = pfde_session_load_config(session, path.c_str()); st != PFDE_OK) return fail(st);
    }
  }
  if (!config_file.empty()) {
    if (auto st = pfde_session_load_config(session, config_file.c_str()); st != PFDE_OK) return fail(st);
  }
  for (const auto& [k, v] : settings) {
    if (auto st = pfde_session_set(session, k.c_str(), v.c_str()); st != PFDE_OK) return fail(st);
  }

  std::signal(SIGINT, on_sigint);
  const std::string command = app.get_subcommands().front()->get_name();
  const pfde_status st = pfde_session_run(session, command.c_str(), print_line, nullptr);
  std::fflush(stdout);
  if (*pfde_last_error()) std::fprintf(stderr, "pfde: %s\n", pfde_last_error());
  if (st == PFDE_PARTIAL && !*pfde_last_error()) {
    std::fprintf(stderr, "pfde: stopped early; rerun with --resume to continue\n");
  }
  pfde_session_destroy(session);
  return st;
}
