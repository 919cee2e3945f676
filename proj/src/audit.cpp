#include "audit.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "jsonutil.hpp"

namespace pfde::audit {

using nlohmann::json;

AbcTriple make_triple(const mpz_class& a, const mpz_class& b, const mpz_class& c) {
  if (a == 0 || b == 0 || c == 0) fail(ErrorKind::InvalidArgument, "abc triple entries must be nonzero");
  if (a + b != c) fail(ErrorKind::InvalidArgument, "abc triple must satisfy a + b = c");
  if (gcd(a, b) != 1 || gcd(a, c) != 1 || gcd(b, c) != 1) {
    fail(ErrorKind::InvalidArgument, "abc triple must be pairwise coprime");
  }
  return {a, b, c};
}

double log_abs(const mpz_class& v) {
  if (v == 0) fail(ErrorKind::InvalidArgument, "log of zero");
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

QualityReport abc_quality(const AbcTriple& t, const arith::FactorBudget& budget) {
  QualityReport r;
  r.triple = t;
  r.radical = arith::radical(t.a * t.b * t.c, budget);
  if (r.radical >= 2) {
    const double ln = log_abs(r.radical);
    const mpz_class top = std::max({mpz_class(abs(t.a)), mpz_class(abs(t.b)), mpz_class(abs(t.c))});
    r.quality = log_abs(top) / ln;
    r.szpiro = log_abs(t.a * t.b * t.c) / ln;
  }
  return r;
}

std::optional<double> szpiro_exponent(const AbcTriple& t, const arith::FactorBudget& budget) {
  return abc_quality(t, budget).szpiro;
}

SolutionAudit instrument_solution(const model::Equation& eq, const solver::SolutionRecord& record) {
  if (eq.rhs.kind != model::RhsKind::Univariate) {
    fail(ErrorKind::InvalidArgument, "instrumentation needs a univariate right-hand side");
  }
  const auto f = eq.rhs.univariate();
  if (f.degree() < 2) fail(ErrorKind::InvalidArgument, "instrumentation needs degree >= 2");
  if (!solver::check_record(eq, record)) {
    fail(ErrorKind::InvalidArgument, "record does not satisfy the equation");
  }
  SolutionAudit out;
  out.depressed = model::depress_polynomial(f, eq.lhs.b);
  const auto& q = out.depressed.q;
  const std::size_t d = out.depressed.degree();
  out.z = out.depressed.z_of_x.apply(record.assignment.at("x"));

  model::Assignment tuple;
  for (const auto& v : eq.lhs.variables()) tuple[v] = record.assignment.at(v);
  const mpz_class product = model::eval_lhs_product(eq.lhs, tuple);
  const mpz_class cp = out.depressed.c * product;
  if (model::horner(q, out.z) != cp) fail(ErrorKind::Internal, "depressed equation does not hold");

  if (abs(out.z) <= 1) {
    out.degenerate = true;
    out.reason = "|z| <= 1, logarithms degenerate";
    return out;
  }
  out.log_gap = std::fabs(static_cast<double>(d) * log_abs(out.z) - log_abs(product));
  if (out.depressed.pure_power()) {
    out.degenerate = true;
    out.reason = "Q(z) = z^d has no lower terms";
    return out;
  }
  // j = largest index with a nonzero coefficient of z^(d-j)
  for (std::size_t k = 1; k <= d; ++k) {
    if (q[k] != 0) out.j = k;
  }
  const std::size_t j = out.j;
  mpz_class zj, zdj;
  mpz_pow_ui(zj.get_mpz_t(), out.z.get_mpz_t(), j);
  mpz_pow_ui(zdj.get_mpz_t(), out.z.get_mpz_t(), d - j);
  std::vector<mpz_class> r1(q.begin() + 1, q.begin() + static_cast<std::ptrdiff_t>(j) + 1);
  const mpz_class r1z = model::horner(r1, out.z);
  const mpz_class dd = gcd(zj, r1z);
  const mpz_class a = zj / dd, b = r1z / dd;
  if (cp % (zdj * dd) != 0) fail(ErrorKind::Internal, "triple does not divide evenly");
  const mpz_class c = cp / (zdj * dd);
  if (a + b != c) fail(ErrorKind::Internal, "triple does not sum exactly");
  if (b == 0 || c == 0) {
    out.degenerate = true;
    out.reason = "triple has a zero entry";
    return out;
  }
  out.triple = make_triple(a, b, c);
  try {
    out.quality = abc_quality(*out.triple);
  } catch (const FactoringBudgetError&) {
    out.reason = "factoring budget exceeded; quality not computed";
  }
  return out;
}

BoundCheck check_stirling_bound(const std::vector<std::uint64_t>& n) {
  // margin = log(n_1! ... n_r!) - log(4^r prod (n_i/e)^n_i)
  long double lhs = static_cast<long double>(n.size()) * std::log(4.0L);
  long double rhs = 0;
  for (std::uint64_t k : n) {
    const auto v = static_cast<long double>(k);
    if (k > 0) lhs += v * (std::log(v) - 1.0L);
    rhs += std::lgamma(v + 1.0L);
  }
  BoundCheck r;
  r.margin = static_cast<double>(rhs - lhs);
  r.holds = rhs >= lhs;
  return r;
}

StirlingThreshold stirling_threshold(unsigned r, std::uint64_t n_max) {
  if (r < 1) fail(ErrorKind::InvalidArgument, "r must be >= 1");
  StirlingThreshold out;
  out.r = r;
  out.n_max = n_max;
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    if (!check_stirling_bound(std::vector<std::uint64_t>(r, n)).holds) out.failures.push_back(n);
  }
  if (out.failures.empty()) {
    out.threshold = 0;
  } else if (out.failures.back() < n_max) {
    out.threshold = out.failures.back() + 1;
  }
  return out;
}

BoundCheck check_finsler(std::uint64_t n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "n must be >= 1");
  const mpz_class p = arith::primorial(n);
  BoundCheck r;
  // p < 4^n = 2^(2n) iff p has at most 2n bits
  r.holds = mpz_sizeinbase(p.get_mpz_t(), 2) <= 2 * n;
  r.margin = 2.0 * static_cast<double>(n) * std::log(2.0) - log_abs(p);
  return r;
}

FinslerSweep sweep_finsler(std::uint64_t limit) {
  FinslerSweep s;
  s.limit = limit;
  const auto table = arith::sieve_primes(limit);
  std::size_t next = 0;
  mpz_class p = 1;
  bool first = true;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    while (next < table.size() && table.primes()[next] <= n) p *= static_cast<unsigned long>(table.primes()[next++]);
    const bool ok = mpz_sizeinbase(p.get_mpz_t(), 2) <= 2 * n;
    const double margin = 2.0 * static_cast<double>(n) * std::log(2.0) - (p == 1 ? 0.0 : log_abs(p));
    if (!ok && s.all_hold) {
      s.all_hold = false;
      s.first_failure = n;
    }
    if (first || margin < s.min_margin) {
      s.min_margin = margin;
      s.argmin = n;
      first = false;
    }
  }
  return s;
}

DecayReport radical_littleo_report(const model::FactorialProductLHS& shape, std::uint64_t n_max) {
  for (const auto& f : shape.factorials) {
    if (f.kind == model::FactorialKind::Bhargava && f.set.is_truncation()) {
      fail(ErrorKind::InvalidArgument, "decay report needs Z or arithmetic progression sets");
    }
  }
  DecayReport out;
  const mpz_class cmax = shape.max_constant();
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    model::Assignment a;
    for (const auto& v : shape.variables()) a[v] = n;
    const mpz_class value = abs(model::eval_lhs(shape, a));
    // every prime factor is <= max(n, constants)
    const std::uint64_t bound = std::max<std::uint64_t>(n, cmax.get_ui());
    const auto table = arith::sieve_primes(bound);
    mpz_class rad = 1;
    for (std::uint64_t p : table.primes()) {
      if (mpz_divisible_ui_p(value.get_mpz_t(), p)) rad *= static_cast<unsigned long>(p);
    }
    mpq_class ratio(rad, value);
    ratio.canonicalize();
    out.series.push_back({n, ratio});
  }
  out.non_increasing_from = out.series.empty() ? 0 : out.series.back().n;
  for (std::size_t i = out.series.size(); i-- > 1;) {
    if (out.series[i].ratio > out.series[i - 1].ratio) break;
    out.non_increasing_from = out.series[i - 1].n;
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json report(const char* kind, json inputs, json metrics, json holds) {
  return {{"schema", solver::kSchemaVersion},
          {"kind", kind},
          {"inputs", std::move(inputs)},
          {"metrics", std::move(metrics)},
          {"holds", std::move(holds)}};
}

json triple_json(const AbcTriple& t) {
  return {mpz_to_json(t.a), mpz_to_json(t.b), mpz_to_json(t.c)};
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const QualityReport& r) {
  return report("abc_quality", {{"triple", triple_json(r.triple)}},
                {{"radical", mpz_to_json(r.radical)}, {"quality", opt(r.quality)}, {"szpiro", opt(r.szpiro)}},
                nullptr);
}

json to_json(const SolutionAudit& r, const solver::SolutionRecord& record) {
  json metrics{{"z", mpz_to_json(r.z)},
               {"c", mpz_to_json(r.depressed.c)},
               {"j", r.j},
               {"log_gap", opt(r.log_gap)},
               {"degenerate", r.degenerate}};
  if (!r.reason.empty()) metrics["reason"] = r.reason;
  if (r.triple) metrics["triple"] = triple_json(*r.triple);
  if (r.quality) {
    metrics["radical"] = mpz_to_json(r.quality->radical);
    metrics["quality"] = opt(r.quality->quality);
    metrics["szpiro"] = opt(r.quality->szpiro);
  }
  return report("instrument_solution", solver::record_to_json(record), metrics, nullptr);
}

json stirling_json(const std::vector<std::uint64_t>& n, const BoundCheck& r) {
  return report("stirling_bound", {{"n", n}}, {{"margin", r.margin}}, r.holds);
}

json to_json(const StirlingThreshold& r) {
  return report("stirling_threshold", {{"r", r.r}, {"n_max", r.n_max}},
                {{"threshold", r.threshold ? json(*r.threshold) : json(nullptr)}, {"failures", r.failures}},
                r.failures.empty());
}

json finsler_json(std::uint64_t n, const BoundCheck& r) {
  return report("finsler", {{"n", n}}, {{"margin", r.margin}}, r.holds);
}

json to_json(const FinslerSweep& r) {
  return report("finsler_sweep", {{"limit", r.limit}},
                {{"min_margin", r.min_margin},
                 {"argmin", r.argmin},
                 {"first_failure", r.first_failure ? json(*r.first_failure) : json(nullptr)}},
                r.all_hold);
}

json to_json(const DecayReport& r, const model::FactorialProductLHS& shape) {
  json series = json::array();
  for (const auto& p : r.series) {
    series.push_back({{"n", p.n}, {"ratio", p.ratio.get_str()}, {"value", p.ratio.get_d()}});
  }
  return report("radical_decay", {{"lhs", model::print_lhs(shape)}},
                {{"series", series}, {"non_increasing_from", r.non_increasing_from}}, nullptr);
}

}  // namespace pfde::audit
