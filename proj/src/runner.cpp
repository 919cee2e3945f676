#include "runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "audit.hpp"
#include "bhargava.hpp"
#include "errors.hpp"
#include "jsonutil.hpp"

namespace pfde::cli {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Options

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const std::string v = trim(text);
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    fail(ErrorKind::InvalidArgument, "bad value '" + text + "' for " + key);
  }
  return value;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(text), &used);
    if (used != trim(text).size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "bad value '" + text + "' for " + key);
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v.empty() || v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(ErrorKind::InvalidArgument, "bad boolean '" + text + "' for " + key);
}

std::vector<std::uint64_t> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<std::uint64_t>(key, item));
  if (out.empty()) fail(ErrorKind::InvalidArgument, "empty list for " + key);
  return out;
}

// VAR=LO..HI or VAR=V
std::pair<std::string, solver::Range> parse_bound(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) fail(ErrorKind::InvalidArgument, "bound must look like VAR=LO..HI");
  const std::string var = trim(text.substr(0, eq));
  const std::string range = trim(text.substr(eq + 1));
  if (var.empty()) fail(ErrorKind::InvalidArgument, "bound has no variable name");
  solver::Range r;
  const auto dots = range.find("..");
  if (dots == std::string::npos) {
    r.lo = r.hi = parse_number<std::int64_t>("bound", range);
  } else {
    r.lo = parse_number<std::int64_t>("bound", range.substr(0, dots));
    r.hi = parse_number<std::int64_t>("bound", range.substr(dots + 2));
  }
  if (r.lo > r.hi) fail(ErrorKind::InvalidArgument, "empty range for " + var);
  return {var, r};
}

}  // namespace

void apply_option(RunConfig& c, const std::string& raw_key, const std::string& value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '_', '-');
  if (key == "eq") {
    c.equation = value;
  } else if (key == "preset") {
    c.preset = trim(value);
  } else if (key == "bound") {
    auto [var, r] = parse_bound(value);
    c.bounds[var] = r;
  } else if (key == "limit") {
    c.limit = parse_number<std::uint64_t>(key, value);
  } else if (key == "witnesses") {
    c.witnesses = parse_number<std::size_t>(key, value);
    if (c.witnesses == 0) fail(ErrorKind::InvalidArgument, "witnesses must be positive");
  } else if (key == "workers") {
    c.workers = parse_number<unsigned>(key, value);
    if (c.workers == 0) fail(ErrorKind::InvalidArgument, "workers must be positive");
  } else if (key == "out") {
    c.out = trim(value);
  } else if (key == "checkpoint") {
    c.checkpoint = trim(value);
  } else if (key == "resume") {
    c.resume = parse_bool(key, value);
  } else if (key == "budget-seconds") {
    c.budget_seconds = parse_double(key, value);
    if (!(*c.budget_seconds > 0)) fail(ErrorKind::InvalidArgument, "budget-seconds must be positive");
  } else if (key == "budget-nodes") {
    c.budget_nodes = parse_number<std::uint64_t>(key, value);
    if (*c.budget_nodes == 0) fail(ErrorKind::InvalidArgument, "budget-nodes must be positive");
  } else if (key == "format") {
    c.format = trim(value);
    if (c.format != "jsonl" && c.format != "csv") fail(ErrorKind::InvalidArgument, "format must be jsonl or csv");
  } else if (key == "prune") {
    c.prune = parse_bool(key, value);
  } else if (key == "checkpoint-every") {
    c.checkpoint_every = parse_number<std::uint64_t>(key, value);
  } else if (key == "b") {
    c.b = trim(value);
  } else if (key == "bases") {
    c.bases = parse_list(key, value);
  } else if (key == "r") {
    const auto r = parse_number<std::size_t>(key, value);
    if (r == 0) fail(ErrorKind::InvalidArgument, "r must be positive");
    c.bases.assign(r, 1);
  } else if (key == "d") {
    c.d = parse_number<unsigned long>(key, value);
  } else if (key == "t") {
    c.t = parse_number<unsigned long>(key, value);
  } else if (key == "form") {
    c.form = value;
  } else if (key == "route") {
    c.route = trim(value);
  } else if (key == "ratio") {
    c.ratio = trim(value);
  } else if (key == "set") {
    c.set = trim(value);
  } else if (key == "triples") {
    c.triples.push_back(trim(value));
  } else if (key == "records") {
    c.records.push_back(trim(value));
  } else if (key == "finsler") {
    c.finsler = parse_number<std::uint64_t>(key, value);
  } else if (key == "stirling") {
    c.stirling.push_back(parse_list(key, value));
  } else if (key == "stirling-r") {
    c.stirling_r = parse_number<unsigned>(key, value);
  } else if (key == "decay") {
    c.decay = value;
  } else {
    fail(ErrorKind::InvalidArgument, "unknown option '" + raw_key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::InvalidArgument, path + ":" + std::to_string(number) + ": expected key = value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

std::optional<std::string> default_config_path() {
  const char* dir = std::getenv("PFDE_CONFIG_DIR");
  if (!dir || !*dir) return std::nullopt;
  const fs::path p = fs::path(dir) / "pfde.conf";
  if (!fs::exists(p)) return std::nullopt;
  return p.string();
}

// ---------------------------------------------------------------------------
// Presets

const std::vector<Preset>& presets() {
  static const std::vector<Preset> corpus = {
      {"brocard", "1 * n! = x^2 - 1", "n! + 1 = x^2", {{"n", {0, 10}}}},
      {"factorial-square", "1 * n! = x^2", "n! = x^2", {{"n", {0, 300}}}},
      {"ulas-2nn-square", "1 * n!*AP(2,0) = x^2", "2^n n! = x^2, written as n!_S for S = 2Z", {{"n", {0, 100}}}},
      {"ramanujan-nagell", "1 * 2^n = x^2 + 7", "2^n - 7 = x^2", {{"n", {0, 60}}}},
      {"erdos-oblath-sum", "1 * n! = x^3 + y^3", "n! = x^3 + y^3", {{"n", {0, 10}}, {"y", {-200, 200}}}},
      {"erdos-oblath-diff", "1 * n! = x^3 - y^3", "n! = x^3 - y^3", {{"n", {0, 10}}, {"y", {-200, 200}}}},
      {"dabrowski", "1 * n! = x^2 + y^2 - 1", "n! + 1 = x^2 + y^2", {{"n", {0, 8}}, {"y", {-200, 200}}}},
      {"ulas-double-factorial", "1 * n!! = x^2 - 1", "x^2 - 1 = n!!", {{"n", {0, 60}}}},
      {"xy-sum", "1 * n! = x^2*y + x*y^2 ; coprime", "n! = x^2 y + y^2 x with gcd(x,y) = 1", {{"n", {0, 12}}}},
      {"xy-diff", "1 * n! = y^2*x - x^2*y ; coprime", "n! = y^2 x - x^2 y with gcd(x,y) = 1", {{"n", {0, 12}}}},
      {"xy-sum-7", "1 * 7^m * n! = x^2*y + x*y^2 ; coprime", "x^2 y + y^2 x = 7^m n!",
       {{"m", {0, 6}}, {"n", {0, 10}}}},
      {"xy-diff-7", "1 * 7^m * n! = x^2*y - x*y^2 ; coprime", "x^2 y - y^2 x = 7^m n!",
       {{"m", {0, 6}}, {"n", {0, 10}}}},
      {"quartic-sum-3", "1 * 3^m * m! * n! = x^4*y^2 + x^2*y^4 ; coprime", "x^4 y^2 + y^4 x^2 = 3^m m! n!",
       {{"m", {0, 6}}, {"n", {0, 8}}}},
      {"quartic-diff-3", "1 * 3^m * m! * n! = x^4*y^2 - x^2*y^4 ; coprime", "x^4 y^2 - y^4 x^2 = 3^m m! n!",
       {{"m", {0, 6}}, {"n", {0, 8}}}},
      {"triple-diagonal", "2 * n! * m! * l! = x^2*y + x*y^2", "P(x)^2 Q(y) + Q(y)^2 P(x) with P = x, Q = y",
       {{"n", {0, 6}}, {"m", {0, 6}}, {"l", {0, 6}}, {"y", {-60, 60}}}},
      {"takeda-sum-squares", "1 * n! = x^2 + y^2", "binary form x^2 + y^2", {{"n", {0, 12}}, {"y", {-200, 200}}}},
      {"takeda-cubic", "1 * n! = x^3 + 2*y^3", "binary form x^3 + 2y^3", {{"n", {0, 12}}, {"y", {-200, 200}}}},
      {"takeda-reducible", "1 * n! * m! = (x*y)^4*(x-y)^3", "binary form (xy)^4 (x-y)^3",
       {{"n", {0, 8}}, {"m", {0, 8}}, {"y", {-12, 12}}}},
  };
  return corpus;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Output and checkpoints

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << v;
  return ss.str();
}

// Single writer for the result stream: a file when --out is given, else the sink.
class Output {
 public:
  Output(const RunConfig& c, const LineSink& sink, std::optional<std::uint64_t> keep_bytes) : sink_(sink) {
    if (c.out.empty()) return;
    if (keep_bytes) {
      if (!fs::exists(c.out) || fs::file_size(c.out) < *keep_bytes) {
        fail(ErrorKind::Checkpoint, "output file " + c.out + " is shorter than the checkpoint records");
      }
      fs::resize_file(c.out, *keep_bytes);
      file_.open(c.out, std::ios::binary | std::ios::app);
      bytes_ = *keep_bytes;
    } else {
      file_.open(c.out, std::ios::binary | std::ios::trunc);
    }
    if (!file_) fail(ErrorKind::Io, "cannot write " + c.out);
  }

  void line(const std::string& text) {
    if (file_.is_open()) {
      file_ << text << '\n';
      if (!file_) fail(ErrorKind::Io, "write failed");
    } else {
      sink_(text);
    }
    bytes_ += text.size() + 1;
  }

  void flush() {
    if (file_.is_open()) file_.flush();
  }

  std::uint64_t bytes() const { return bytes_; }

 private:
  const LineSink& sink_;
  std::ofstream file_;
  std::uint64_t bytes_ = 0;
};

void save_checkpoint(const std::string& path, const json& state) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Io, "cannot write checkpoint " + tmp);
    f << state.dump() << '\n';
    if (!f) fail(ErrorKind::Io, "cannot write checkpoint " + tmp);
  }
  fs::rename(tmp, path);
}

json load_checkpoint(const std::string& path, const std::string& command, const std::string& hash) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Checkpoint, "checkpoint " + path + " not found");
  json state;
  try {
    f >> state;
  } catch (const json::exception& e) {
    fail(ErrorKind::Checkpoint, "checkpoint " + path + " is corrupt: " + e.what());
  }
  if (state.value("schema", "") != solver::kSchemaVersion || state.value("command", "") != command) {
    fail(ErrorKind::Checkpoint, "checkpoint " + path + " belongs to a different command or schema");
  }
  if (state.value("hash", "") != hash) {
    fail(ErrorKind::Checkpoint, "checkpoint " + path + " was written for a different run; refusing to resume");
  }
  return state;
}

// Remaining budgets for this invocation.
class Budget {
 public:
  explicit Budget(const RunConfig& c) : nodes_(c.budget_nodes) {
    if (c.budget_seconds) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(*c.budget_seconds));
    }
  }

  bool stop() const {
    if (interrupt_flag().load()) return true;
    if (nodes_ && *nodes_ == 0) return true;
    return deadline_ && std::chrono::steady_clock::now() >= *deadline_;
  }

  std::optional<double> seconds_left() const {
    if (!deadline_) return std::nullopt;
    return std::chrono::duration<double>(*deadline_ - std::chrono::steady_clock::now()).count();
  }

  std::optional<std::uint64_t> nodes_left() const { return nodes_; }

  void spend(std::uint64_t n) {
    if (nodes_) *nodes_ -= std::min(*nodes_, n);
  }

 private:
  std::optional<std::uint64_t> nodes_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
};

json summary(const char* command, const char* status) {
  return {{"schema", solver::kSchemaVersion}, {"kind", "summary"}, {"command", command}, {"status", status}};
}

std::string bounds_text(const std::map<std::string, solver::Range>& bounds) {
  std::string out;
  for (const auto& [var, r] : bounds) out += var + "=" + std::to_string(r.lo) + ".." + std::to_string(r.hi) + ";";
  return out;
}

model::Equation resolve_equation(const RunConfig& c, std::map<std::string, solver::Range>& bounds) {
  if (!c.preset.empty() && !c.equation.empty()) fail(ErrorKind::InvalidArgument, "give either --eq or --preset, not both");
  bounds = c.bounds;
  if (!c.preset.empty()) {
    const Preset* p = find_preset(c.preset);
    if (!p) fail(ErrorKind::InvalidArgument, "unknown preset '" + c.preset + "'");
    for (const auto& [var, r] : p->bounds) bounds.try_emplace(var, r);
    return model::parse_equation(p->equation);
  }
  if (c.equation.empty()) fail(ErrorKind::InvalidArgument, "no equation: use --eq or --preset");
  return model::parse_equation(c.equation);
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_row(const solver::SolutionRecord& r) {
  std::string assignment;
  for (const auto& [var, v] : r.assignment) {
    if (!assignment.empty()) assignment += ";";
    assignment += var + "=" + v.get_str();
  }
  for (const auto& [var, text] : r.symbolic) {
    if (!assignment.empty()) assignment += ";";
    assignment += var + "=" + text;
  }
  return csv_quote(r.equation) + "," + csv_quote(assignment) + "," + (r.verified ? "true" : "false") + "," +
         csv_quote(solver::certificate_to_json(r.certificate).dump());
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const RunConfig& c, const LineSink& sink) {
  std::map<std::string, solver::Range> bounds;
  const model::Equation eq = resolve_equation(c, bounds);
  solver::SearchBounds sb;
  sb.ranges = bounds;
  sb.workers = c.workers;
  sb.prune = c.prune;
  sb.cancel = &interrupt_flag();
  const auto solver = solver::make_solver(eq, sb);
  const auto space = solver::TupleSpace::for_lhs(eq.lhs, sb);
  const std::string text = model::print_equation(eq);
  const std::string hash = hex(fnv1a("solve\n" + text + "\n" + solver->method() + "\n" + bounds_text(bounds) +
                                     "\nprune=" + std::to_string(c.prune) + "\nformat=" + c.format));
  if (!c.checkpoint.empty() && c.out.empty()) fail(ErrorKind::InvalidArgument, "--checkpoint needs --out");

  std::uint64_t next = 0, found = 0, pruned = 0;
  std::vector<std::string> warnings;
  std::optional<std::uint64_t> keep;
  if (c.resume) {
    if (c.checkpoint.empty()) fail(ErrorKind::InvalidArgument, "--resume needs --checkpoint");
    const json st = load_checkpoint(c.checkpoint, "solve", hash);
    next = st.at("next_index").get<std::uint64_t>();
    found = st.at("found").get<std::uint64_t>();
    pruned = st.at("pruned").get<std::uint64_t>();
    warnings = st.at("warnings").get<std::vector<std::string>>();
    keep = st.at("out_bytes").get<std::uint64_t>();
  }
  Output out(c, sink, keep);
  const bool csv = c.format == "csv";
  if (csv && !keep) out.line("equation,assignment,verified,certificate");

  auto checkpoint = [&] {
    if (c.checkpoint.empty()) return;
    out.flush();
    save_checkpoint(c.checkpoint, {{"schema", solver::kSchemaVersion},
                                   {"command", "solve"},
                                   {"hash", hash},
                                   {"next_index", next},
                                   {"total", space.size()},
                                   {"found", found},
                                   {"pruned", pruned},
                                   {"warnings", warnings},
                                   {"out_bytes", out.bytes()}});
  };

  Budget budget(c);
  const std::uint64_t block = c.checkpoint_every ? c.checkpoint_every : 1000;
  bool partial = false;
  while (next < space.size()) {
    if (budget.stop()) {
      partial = true;
      break;
    }
    const std::uint64_t end = std::min(space.size(), next + block);
    sb.wall_seconds = budget.seconds_left();
    sb.node_budget = budget.nodes_left();
    const auto res = solver::run_tuples(*solver, space, next, end, sb);
    for (const auto& r : res.records) out.line(csv ? csv_row(r) : solver::record_to_json(r).dump());
    found += res.records.size();
    pruned += res.pruned.size();
    for (const auto& w : res.warnings) {
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
    budget.spend(res.end - res.begin);
    next = res.end;
    checkpoint();
    if (res.end < end) {
      partial = true;
      break;
    }
  }
  checkpoint();
  json s = summary("solve", partial ? "partial" : "complete");
  s["equation"] = text;
  s["method"] = solver->method();
  s["found"] = found;
  s["pruned"] = pruned;
  s["tuples_examined"] = next;
  s["tuples_total"] = space.size();
  s["exhausted"] = partial;
  s["warnings"] = warnings;
  if (!csv) out.line(s.dump());
  out.flush();
  return partial ? kPartial : kComplete;
}

// ---------------------------------------------------------------------------
// scan-brocard

json scan_state_json(const solver::ScanState& st, const std::string& hash) {
  json rejections = json::array();
  for (const auto& [n, p] : st.rejections) rejections.push_back({n, p});
  return {{"schema", solver::kSchemaVersion},
          {"command", "scan-brocard"},
          {"hash", hash},
          {"limit", st.limit},
          {"next_n", st.next_n},
          {"witnesses", st.witnesses},
          {"residues", st.residues},
          {"candidates", st.candidates},
          {"rejections", rejections}};
}

solver::ScanState scan_state_from(const json& j) {
  solver::ScanState st;
  st.limit = j.at("limit").get<std::uint64_t>();
  st.next_n = j.at("next_n").get<std::uint64_t>();
  st.witnesses = j.at("witnesses").get<std::vector<std::uint64_t>>();
  st.residues = j.at("residues").get<std::vector<std::uint64_t>>();
  st.candidates = j.at("candidates").get<std::vector<std::uint64_t>>();
  for (const auto& r : j.at("rejections")) st.rejections.emplace_back(r.at(0).get<std::uint64_t>(), r.at(1).get<std::uint64_t>());
  if (st.residues.size() != st.witnesses.size()) fail(ErrorKind::Checkpoint, "checkpoint residues do not match witnesses");
  return st;
}

int cmd_scan(const RunConfig& c, const LineSink& sink) {
  if (!c.limit) fail(ErrorKind::InvalidArgument, "scan-brocard needs --limit");
  if (*c.limit < 2) fail(ErrorKind::InvalidArgument, "limit must be >= 2");
  if (c.format != "jsonl") fail(ErrorKind::InvalidArgument, "scan-brocard writes JSONL only");
  const std::string hash =
      hex(fnv1a("scan-brocard\nlimit=" + std::to_string(*c.limit) + "\nwitnesses=" + std::to_string(c.witnesses)));
  solver::ScanState st;
  if (c.resume) {
    if (c.checkpoint.empty()) fail(ErrorKind::InvalidArgument, "--resume needs --checkpoint");
    st = scan_state_from(load_checkpoint(c.checkpoint, "scan-brocard", hash));
  } else {
    st = solver::scan_begin(*c.limit, c.witnesses);
  }
  Budget budget(c);
  const std::uint64_t every = c.checkpoint_every ? c.checkpoint_every : 100000;
  bool partial = false;
  while (st.next_n <= st.limit) {
    if (budget.stop()) {
      partial = true;
      break;
    }
    std::uint64_t upto = std::min(st.limit, st.next_n + every - 1);
    if (auto left = budget.nodes_left()) upto = std::min(upto, st.next_n + *left - 1);
    const std::uint64_t before = st.next_n;
    solver::scan_advance(st, upto, c.workers);
    budget.spend(st.next_n - before);
    if (!c.checkpoint.empty()) save_checkpoint(c.checkpoint, scan_state_json(st, hash));
  }
  Output out(c, sink, std::nullopt);
  json s = summary("scan-brocard", partial ? "partial" : "complete");
  s["limit"] = st.limit;
  s["scanned_through"] = st.next_n == 0 ? json(nullptr) : json(st.next_n - 1);
  if (!partial) {
    const auto report = solver::scan_finish(st);
    out.line(solver::scan_report_to_json(report).dump());
    s["confirmed"] = report.confirmed;
    s["candidates"] = report.candidates.size();
  }
  s["exhausted"] = partial;
  out.line(s.dump());
  return partial ? kPartial : kComplete;
}

// ---------------------------------------------------------------------------
// construct

int cmd_construct(const RunConfig& c, const LineSink& sink) {
  mpz_class b;
  if (b.set_str(c.b, 10) != 0) fail(ErrorKind::InvalidArgument, "bad value '" + c.b + "' for b");
  std::vector<std::uint64_t> bases = c.bases;
  if (bases.empty()) bases.assign(c.d, 1);
  solver::SolutionRecord rec;
  if (c.form.empty()) {
    rec = solver::construct_power_family({b, bases, c.d, c.t});
  } else {
    const auto eq = model::parse_equation("1 * n! = " + c.form);
    if (eq.rhs.kind != model::RhsKind::BinaryForm) fail(ErrorKind::InvalidArgument, "--form must be a binary form");
    solver::FormFamilyParams p;
    p.form = eq.rhs.form();
    p.b = b;
    p.bases = bases;
    p.t = c.t;
    if (c.route == "auto") {
      p.proportion = solver::Proportion::Auto;
    } else if (c.route == "diagonal") {
      p.proportion = solver::Proportion::Diagonal;
    } else if (c.route == "x=sy") {
      p.proportion = solver::Proportion::XisSY;
    } else if (c.route == "y=sx") {
      p.proportion = solver::Proportion::YisSX;
    } else {
      fail(ErrorKind::InvalidArgument, "route must be auto, diagonal, x=sy or y=sx");
    }
    if (c.ratio) {
      mpz_class r;
      if (r.set_str(*c.ratio, 10) != 0) fail(ErrorKind::InvalidArgument, "bad ratio");
      p.ratio = r;
    }
    rec = solver::construct_form_family(p);
  }
  Output out(c, sink, std::nullopt);
  out.line(solver::record_to_json(rec).dump());
  if (!rec.verified) fail(ErrorKind::Internal, "constructed record failed verification");
  return kComplete;
}

// ---------------------------------------------------------------------------
// audit

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  std::string line;
  if (path == "-") {
    while (std::getline(std::cin, line)) lines.push_back(line);
    return lines;
  }
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

int cmd_audit(const RunConfig& c, const LineSink& sink) {
  Output out(c, sink, std::nullopt);
  bool any = false;
  for (const auto& path : c.triples) {
    for (std::string line : read_lines(path)) {
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      std::string a, b, cc;
      if (!(ss >> a)) continue;
      if (a[0] == '#') continue;
      if (!(ss >> b >> cc)) fail(ErrorKind::InvalidArgument, "triple line needs three integers: " + line);
      mpz_class va, vb, vc;
      if (va.set_str(a, 10) || vb.set_str(b, 10) || vc.set_str(cc, 10)) {
        fail(ErrorKind::InvalidArgument, "bad integer in triple line: " + line);
      }
      // canonical order 0 < a <= b < c (up to overall sign)
      std::vector<mpz_class> v{abs(va), abs(vb), abs(vc)};
      std::sort(v.begin(), v.end());
      out.line(audit::to_json(audit::abc_quality(audit::make_triple(v[0], v[1], v[2]))).dump());
      any = true;
    }
  }
  for (const auto& path : c.records) {
    for (const auto& line : read_lines(path)) {
      if (trim(line).empty()) continue;
      const json j = json::parse(line);
      if (j.value("kind", "") != "solution") continue;
      const auto rec = solver::record_from_json(j);
      const auto eq = model::parse_equation(rec.equation);
      out.line(audit::to_json(audit::instrument_solution(eq, rec), rec).dump());
      any = true;
    }
  }
  if (c.finsler) {
    out.line(audit::to_json(audit::sweep_finsler(*c.finsler)).dump());
    any = true;
  }
  for (const auto& n : c.stirling) {
    out.line(audit::stirling_json(n, audit::check_stirling_bound(n)).dump());
    any = true;
  }
  if (c.stirling_r) {
    out.line(audit::to_json(audit::stirling_threshold(*c.stirling_r, c.limit.value_or(1000))).dump());
    any = true;
  }
  if (!c.decay.empty()) {
    const auto lhs = model::parse_equation(c.decay + " = x").lhs;
    out.line(audit::to_json(audit::radical_littleo_report(lhs, c.limit.value_or(30)), lhs).dump());
    any = true;
  }
  if (!any) fail(ErrorKind::InvalidArgument, "audit needs --triples, --records, --finsler, --stirling, --stirling-r or --decay");
  return kComplete;
}

// ---------------------------------------------------------------------------
// bhargava

int cmd_bhargava(const RunConfig& c, const LineSink& sink) {
  const auto set = bhargava::SetSpec::parse(c.set);
  solver::Range range{0, 10};
  if (c.bounds.size() > 1) fail(ErrorKind::InvalidArgument, "bhargava takes a single bound n=LO..HI");
  if (!c.bounds.empty()) range = c.bounds.begin()->second;
  if (range.lo < 0) fail(ErrorKind::InvalidArgument, "n must be nonnegative");
  Output out(c, sink, std::nullopt);
  const bool csv = c.format == "csv";
  if (csv) out.line("n,value");
  for (std::int64_t n = range.lo; n <= range.hi; ++n) {
    const mpz_class v = bhargava::bhargava_factorial(set, static_cast<std::uint64_t>(n));
    if (csv) {
      out.line(std::to_string(n) + "," + v.get_str());
    } else {
      out.line(json{{"schema", solver::kSchemaVersion},
                    {"kind", "bhargava"},
                    {"set", set.to_string()},
                    {"n", n},
                    {"value", mpz_to_json(v)},
                    {"method", set.has_closed_form() ? "closed_form" : "p_ordering_stable"}}
                   .dump());
    }
  }
  return kComplete;
}

// ---------------------------------------------------------------------------
// prune-test

int cmd_prune_test(const RunConfig& c, const LineSink& sink) {
  std::map<std::string, solver::Range> bounds;
  const model::Equation eq = resolve_equation(c, bounds);
  solver::SearchBounds sb;
  sb.ranges = bounds;
  sb.workers = c.workers;
  sb.prune = true;
  const auto with = solver::solve(eq, sb);
  sb.prune = false;
  const auto without = solver::solve(eq, sb);
  Output out(c, sink, std::nullopt);
  for (const auto& p : with.pruned) {
    json tuple = json::object();
    for (const auto& [var, v] : p.assignment) tuple[var] = mpz_to_json(v);
    out.line(json{{"schema", solver::kSchemaVersion},
                  {"kind", "prune"},
                  {"tuple", tuple},
                  {"certificate", solver::certificate_to_json(p.certificate)}}
                 .dump());
  }
  // a pruned tuple must have no solution in the unpruned run
  bool sound = true;
  for (const auto& p : with.pruned) {
    for (const auto& r : without.records) {
      bool same = true;
      for (const auto& [var, v] : p.assignment) same = same && r.assignment.at(var) == v;
      if (same) sound = false;
    }
  }
  const bool identical = with.records == without.records;
  json s = summary("prune-test", "complete");
  s["equation"] = model::print_equation(eq);
  s["tuples"] = with.total;
  s["pruned"] = with.pruned.size();
  s["found"] = without.records.size();
  s["sound"] = sound;
  s["identical"] = identical;
  out.line(s.dump());
  if (!sound || !identical) fail(ErrorKind::Internal, "pruned and unpruned searches disagree");
  return kComplete;
}

int cmd_presets(const RunConfig& c, const LineSink& sink) {
  Output out(c, sink, std::nullopt);
  for (const auto& p : presets()) {
    json bounds = json::object();
    for (const auto& [var, r] : p.bounds) bounds[var] = {r.lo, r.hi};
    out.line(json{{"kind", "preset"}, {"name", p.name}, {"equation", p.equation}, {"note", p.note}, {"bounds", bounds}}
                 .dump());
  }
  return kComplete;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& config, const LineSink& sink, std::string& error) {
  error.clear();
  try {
    if (command == "solve") return cmd_solve(config, sink);
    if (command == "scan-brocard") return cmd_scan(config, sink);
    if (command == "construct") return cmd_construct(config, sink);
    if (command == "audit") return cmd_audit(config, sink);
    if (command == "bhargava") return cmd_bhargava(config, sink);
    if (command == "prune-test") return cmd_prune_test(config, sink);
    if (command == "presets") return cmd_presets(config, sink);
    error = "unknown command '" + command + "'";
    return kConfigError;
  } catch (const Error& e) {
    error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    if (e.kind() == ErrorKind::Budget) return kPartial;
    if (e.kind() == ErrorKind::Internal) return kInternalError;
    return kConfigError;
  } catch (const json::exception& e) {
    error = std::string("invalid JSON input: ") + e.what();
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    error = std::string("io: ") + e.what();
    return kConfigError;
  } catch (const std::exception& e) {
    error = std::string("internal: ") + e.what();
    return kInternalError;
  }
}

}  // namespace pfde::cli
