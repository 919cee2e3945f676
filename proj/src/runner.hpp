#pragma once

// Batch front end shared by the command-line tool and the C API: run
// configuration, the preset corpus, output routing and checkpoints.

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "solver.hpp"

namespace pfde::cli {

enum ExitCode : int {
  kComplete = 0,
  kConfigError = 2,
  kPartial = 3,
  kInternalError = 4,
};

struct RunConfig {
  std::string equation;
  std::string preset;
  std::map<std::string, solver::Range> bounds;
  std::optional<std::uint64_t> limit;
  std::size_t witnesses = 25;
  unsigned workers = 1;
  std::string out;
  std::string checkpoint;
  bool resume = false;
  std::optional<double> budget_seconds;
  std::optional<std::uint64_t> budget_nodes;
  std::string format = "jsonl";
  bool prune = true;
  std::uint64_t checkpoint_every = 0;  // 0: command default

  // construct
  std::string b = "1";
  std::vector<std::uint64_t> bases;
  unsigned long d = 2;
  unsigned long t = 1;
  std::string form;
  std::string route = "auto";
  std::optional<std::string> ratio;

  // bhargava
  std::string set = "Z";

  // audit
  std::vector<std::string> triples;  // files of "a b c" lines
  std::vector<std::string> records;  // JSONL files ("-" = stdin)
  std::optional<std::uint64_t> finsler;
  std::vector<std::vector<std::uint64_t>> stirling;
  std::optional<unsigned> stirling_r;
  std::string decay;
};

/// Applies one `key=value` setting (keys mirror the long flag names).
void apply_option(RunConfig& config, const std::string& key, const std::string& value);

/// Reads a key=value file: blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Default config file: $PFDE_CONFIG_DIR/pfde.conf when the variable is set
/// and the file exists.
std::optional<std::string> default_config_path();

struct Preset {
  std::string name;
  std::string equation;
  std::string note;
  std::map<std::string, solver::Range> bounds;  // used when none are given
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

using LineSink = std::function<void(const std::string&)>;

/// Set from a signal handler; long runs stop at the next chunk boundary and
/// write a consistent checkpoint.
std::atomic<bool>& interrupt_flag();

/// Runs one subcommand. Errors are reported through `error` and the exit code.
int run_command(const std::string& command, const RunConfig& config, const LineSink& sink,
                std::string& error);

/// 64-bit FNV-1a, used to guard checkpoints against a changed run.
std::uint64_t fnv1a(const std::string& text);

}  // namespace pfde::cli
