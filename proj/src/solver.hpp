#pragma once

// Search and construction procedures for factorial-product equations.
//
// Every search walks a tuple space (one inclusive range per left-hand side
// variable) in canonical order: lexicographic, first variable most
// significant. Tuples are addressed by their linear index so a search can be
// split into chunks for worker threads or resumed from a checkpoint; results
// are always merged back in index order.

#include <gmpxx.h>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "model.hpp"

namespace pfde::solver {

struct Range {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::uint64_t size() const { return static_cast<std::uint64_t>(hi - lo) + 1; }
  bool contains(const mpz_class& v) const { return v >= lo && v <= hi; }
};

struct SearchBounds {
  std::map<std::string, Range> ranges;  // LHS variables, plus optional x / y
  std::optional<double> wall_seconds;
  std::optional<std::uint64_t> node_budget;  // tuples examined
  unsigned workers = 1;
  bool prune = true;
  const std::atomic<bool>* cancel = nullptr;  // checked between chunks

  const Range* find(const std::string& var) const;
};

// ---------------------------------------------------------------------------
// Records

struct ExactEquality {};

struct PruneCertificate {
  enum class Kind { Bertrand, NoRootModQ, Sign };
  Kind kind = Kind::Bertrand;
  std::uint64_t q = 0;
  mpz_class valuation = 0;
  unsigned long degree = 0;
};

struct ConstructionCertificate {
  std::string route;  // "power_family", "diagonal", "x=sy", "y=sx"
  mpz_class t, r, s, m;
  mpz_class proportion = 1;    // the s of x = s*y (or y = s*x)
  mpz_class coefficient = 1;   // contracted form coefficient
  bool expanded_check = false; // true when both sides were also expanded
};

using Certificate = std::variant<ExactEquality, PruneCertificate, ConstructionCertificate>;

struct SolutionRecord {
  std::string equation;
  std::map<std::string, mpz_class> assignment;
  std::map<std::string, std::string> symbolic;  // closed forms too large to expand
  bool verified = false;
  Certificate certificate = ExactEquality{};
  std::vector<std::string> flags;

  bool operator==(const SolutionRecord& other) const;
};

inline constexpr const char* kSchemaVersion = "pfde/1";

nlohmann::json record_to_json(const SolutionRecord& record);
SolutionRecord record_from_json(const nlohmann::json& j);
nlohmann::json certificate_to_json(const Certificate& c);

/// Re-evaluates both sides; true when the record's assignment satisfies eq.
bool check_record(const model::Equation& eq, const SolutionRecord& record);

// ---------------------------------------------------------------------------
// Tuple space

class TupleSpace {
 public:
  TupleSpace(std::vector<std::string> vars, std::vector<Range> ranges);
  static TupleSpace for_lhs(const model::FactorialProductLHS& lhs, const SearchBounds& bounds);

  std::uint64_t size() const { return size_; }
  const std::vector<std::string>& vars() const { return vars_; }
  model::Assignment at(std::uint64_t index) const;

 private:
  std::vector<std::string> vars_;
  std::vector<Range> ranges_;
  std::uint64_t size_ = 1;
};

struct TupleOutcome {
  std::vector<SolutionRecord> records;
  std::optional<PruneCertificate> prune;
  std::vector<std::string> warnings;
};

struct PrunedTuple {
  std::uint64_t index = 0;
  model::Assignment assignment;
  PruneCertificate certificate;
};

struct SearchResult {
  std::vector<SolutionRecord> records;
  std::vector<PrunedTuple> pruned;
  std::uint64_t begin = 0;
  std::uint64_t end = 0;  // one past the last tuple actually examined
  std::uint64_t total = 0;
  bool exhausted = false; // a budget stopped the search before `total`
  std::vector<std::string> warnings;
};

/// Solves the equation at one left-hand side tuple.
class TupleSolver {
 public:
  virtual ~TupleSolver() = default;
  virtual std::string method() const = 0;
  virtual TupleOutcome solve(const model::Assignment& tuple) const = 0;
};

/// Runs `solver` over tuples [begin, end) of `space` with bounds.workers
/// threads. Budgets stop the search at a chunk boundary.
SearchResult run_tuples(const TupleSolver& solver, const TupleSpace& space, std::uint64_t begin,
                        std::uint64_t end, const SearchBounds& bounds);

/// Picks the solver for the equation's right-hand side shape.
std::unique_ptr<TupleSolver> make_solver(const model::Equation& eq, const SearchBounds& bounds);

/// Full search of an equation (dispatches like make_solver).
SearchResult solve(const model::Equation& eq, const SearchBounds& bounds);

// ---------------------------------------------------------------------------
// Integer roots of univariate polynomials

/// Finds every integer x with P(x) = target. P is split into pieces on which
/// it is monotone over the integers, using exact sign changes of P' located
/// recursively; each piece is then bisected.
class IntegerRootFinder {
 public:
  explicit IntegerRootFinder(std::vector<mpz_class> leading_first);
  std::vector<mpz_class> solve(const mpz_class& target) const;
  const std::vector<mpz_class>& breakpoints() const { return breakpoints_; }

 private:
  std::vector<mpz_class> poly_;
  std::vector<mpz_class> breakpoints_;
};

// ---------------------------------------------------------------------------
// Powers (x^d on the right)

std::optional<PruneCertificate> prune_bertrand(const model::FactorialProductLHS& lhs,
                                               const model::Assignment& tuple, unsigned long d);

SearchResult search_power(const model::FactorialProductLHS& lhs, unsigned long d,
                          const SearchBounds& bounds);

struct FamilyParams {
  mpz_class b = 1;
  std::vector<std::uint64_t> bases;  // A_1..A_r
  unsigned long d = 2;
  unsigned long t = 1;
};

/// Explicit infinite family for d <= r: n_1..n_{d-1} = m, n_d = m+1, the
/// rest 1, with s = (Rd)^(td-1) - 1 and m = d(s+1) - 1.
SolutionRecord construct_power_family(const FamilyParams& params);

/// Largest m for which a constructed record is also verified by expanding
/// both sides in full.
inline constexpr unsigned long kExpandLimit = 20000;

// ---------------------------------------------------------------------------
// Univariate right-hand sides

SearchResult solve_univariate(const model::Equation& eq, const SearchBounds& bounds);

// ---------------------------------------------------------------------------
// Brocard scan

struct ScanState {
  std::uint64_t limit = 0;
  std::uint64_t next_n = 0;            // first n not yet sieved
  std::vector<std::uint64_t> witnesses;
  std::vector<std::uint64_t> residues; // (next_n - 1)! mod witness, or 1 at start
  std::vector<std::uint64_t> candidates;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> rejections;  // (n, witness) sample
};

struct ScanReport {
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> witnesses;
  std::vector<std::uint64_t> candidates;  // survived every witness
  std::vector<std::uint64_t> confirmed;   // n! + 1 is a perfect square
  std::vector<std::pair<std::uint64_t, std::uint64_t>> rejections;
};

inline constexpr std::uint64_t kRejectionSample = 32;

ScanState scan_begin(std::uint64_t limit, std::size_t witness_count);
/// Sieves n in [state.next_n, min(until, limit)] inclusive.
void scan_advance(ScanState& state, std::uint64_t until, unsigned workers = 1);
ScanReport scan_finish(const ScanState& state);
ScanReport scan_brocard(std::uint64_t limit, std::size_t witness_count, unsigned workers = 1);

nlohmann::json scan_report_to_json(const ScanReport& report);

// ---------------------------------------------------------------------------
// Binary forms

std::optional<PruneCertificate> prune_no_root_mod_q(const model::BinaryForm& f, std::uint64_t q,
                                                    const mpz_class& v);

SearchResult search_binary_form(const model::Equation& eq, const SearchBounds& bounds,
                                bool coprime_only);

/// Coprime (x, y) with x^(2s) y^s + sign * y^(2s) x^s = N, found through the
/// pairwise coprime factors x^s, y^s, x^s + sign*y^s of N.
std::vector<std::pair<mpz_class, mpz_class>> coprime_product_form_solutions(
    unsigned long s, int sign, const mpz_class& n);

SearchResult search_thue_mahler_form(unsigned long s, int sign,
                                     const model::FactorialProductLHS& lhs,
                                     const SearchBounds& bounds);

/// x^2 y + sign * y^2 x = N over coprime pairs.
SearchResult search_special_form_xy(int sign, const model::FactorialProductLHS& lhs,
                                    const SearchBounds& bounds);

/// Recognizes alpha*x^(2s)y^s + beta*y^(2s)x^s with alpha, beta = +-1.
struct ProductFormShape {
  unsigned long s = 1;
  int alpha = 1;
  int beta = 1;
};
std::optional<ProductFormShape> match_product_form(const model::BivariatePoly& poly);

// ---------------------------------------------------------------------------
// General bivariate right-hand sides

SearchResult solve_bivariate(const model::Equation& eq, const SearchBounds& bounds);

// ---------------------------------------------------------------------------
// Families from binary forms

enum class Proportion { Auto, Diagonal, XisSY, YisSX };

struct FormFamilyParams {
  model::BinaryForm form;
  mpz_class b = 1;
  std::vector<std::uint64_t> bases;
  Proportion proportion = Proportion::Auto;
  std::optional<mpz_class> ratio;  // the s of x = s*y or y = s*x; smallest working s if unset
  unsigned long t = 1;
};

SolutionRecord construct_form_family(const FormFamilyParams& params);

}  // namespace pfde::solver
