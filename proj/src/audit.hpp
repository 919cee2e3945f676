#pragma once

// Numerical instrumentation: abc quality of triples, the log-gap and abc
// triple attached to a univariate solution, Stirling-type and Finsler bounds,
// and the decay of N(F)/F along the diagonal.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arith.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace pfde::audit {

/// a + b = c, all nonzero and pairwise coprime.
struct AbcTriple {
  mpz_class a, b, c;
};

AbcTriple make_triple(const mpz_class& a, const mpz_class& b, const mpz_class& c);

struct QualityReport {
  AbcTriple triple;
  mpz_class radical;
  std::optional<double> quality;  // log max(|a|,|b|,|c|) / log N
  std::optional<double> szpiro;   // log |abc| / log N
};

QualityReport abc_quality(const AbcTriple& t, const arith::FactorBudget& budget = {});
/// nullopt when N(abc) = 1.
std::optional<double> szpiro_exponent(const AbcTriple& t, const arith::FactorBudget& budget = {});

/// Natural logarithm of |v| for v != 0, accurate for any size.
double log_abs(const mpz_class& v);

struct SolutionAudit {
  bool degenerate = false;
  std::string reason;
  mpz_class z;
  model::DepressedForm depressed;
  std::size_t j = 0;              // Q(z) = z^(d-j) * (z^j + R1(z))
  std::optional<double> log_gap;  // |d log|z| - log LHS|
  std::optional<AbcTriple> triple;
  std::optional<QualityReport> quality;
};

SolutionAudit instrument_solution(const model::Equation& eq, const solver::SolutionRecord& record);

struct BoundCheck {
  bool holds = false;
  double margin = 0;  // log(larger side) - log(smaller side) in the bound's direction
};

/// 4^r (n_1/e)^n_1 ... (n_r/e)^n_r <= n_1! ... n_r!
BoundCheck check_stirling_bound(const std::vector<std::uint64_t>& n);

struct StirlingThreshold {
  unsigned r = 1;
  std::uint64_t n_max = 0;
  // smallest n0 with the bound holding for every n in [n0, n_max] on the
  // diagonal n_1 = ... = n_r = n
  std::optional<std::uint64_t> threshold;
  std::vector<std::uint64_t> failures;
};

StirlingThreshold stirling_threshold(unsigned r, std::uint64_t n_max);

/// prod_{p <= n} p < 4^n, decided exactly.
BoundCheck check_finsler(std::uint64_t n);

struct FinslerSweep {
  std::uint64_t limit = 0;
  bool all_hold = true;
  std::optional<std::uint64_t> first_failure;
  double min_margin = 0;
  std::uint64_t argmin = 0;
};

FinslerSweep sweep_finsler(std::uint64_t limit);

struct DecayPoint {
  std::uint64_t n = 0;
  mpq_class ratio;  // N(F)/F
};

struct DecayReport {
  std::vector<DecayPoint> series;
  // smallest n0 from which the series never increases again
  std::uint64_t non_increasing_from = 0;
};

/// N(F)/F for F = lhs with every variable set to n, n = 1..n_max.
DecayReport radical_littleo_report(const model::FactorialProductLHS& shape, std::uint64_t n_max);

// Reports as {"schema", "kind", "inputs", "metrics", "holds"}.
nlohmann::json to_json(const QualityReport& r);
nlohmann::json to_json(const SolutionAudit& r, const solver::SolutionRecord& record);
nlohmann::json stirling_json(const std::vector<std::uint64_t>& n, const BoundCheck& r);
nlohmann::json to_json(const StirlingThreshold& r);
nlohmann::json finsler_json(std::uint64_t n, const BoundCheck& r);
nlohmann::json to_json(const FinslerSweep& r);
nlohmann::json to_json(const DecayReport& r, const model::FactorialProductLHS& shape);

}  // namespace pfde::audit
