#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "arith.hpp"
#include "errors.hpp"
#include "search_internal.hpp"
#include "valuation.hpp"

namespace pfde::solver {

// ---------------------------------------------------------------------------
// Tuple space

TupleSpace::TupleSpace(std::vector<std::string> vars, std::vector<Range> ranges)
    : vars_(std::move(vars)), ranges_(std::move(ranges)) {
  if (vars_.size() != ranges_.size()) fail(ErrorKind::Internal, "tuple space arity mismatch");
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    const Range& r = ranges_[i];
    if (r.lo > r.hi) fail(ErrorKind::InvalidArgument, "empty range for '" + vars_[i] + "'");
    const unsigned __int128 next = static_cast<unsigned __int128>(size_) * r.size();
    if (next > (static_cast<unsigned __int128>(1) << 62)) {
      fail(ErrorKind::ResourceLimit, "tuple space too large");
    }
    size_ = static_cast<std::uint64_t>(next);
  }
}

TupleSpace TupleSpace::for_lhs(const model::FactorialProductLHS& lhs, const SearchBounds& bounds) {
  std::vector<std::string> vars = lhs.variables();
  std::vector<Range> ranges;
  for (const auto& v : vars) {
    const Range* r = bounds.find(v);
    if (!r) fail(ErrorKind::InvalidArgument, "no range given for variable '" + v + "'");
    if (r->lo < 0) fail(ErrorKind::InvalidArgument, "range for '" + v + "' must be nonnegative");
    ranges.push_back(*r);
  }
  return TupleSpace(std::move(vars), std::move(ranges));
}

model::Assignment TupleSpace::at(std::uint64_t index) const {
  model::Assignment a;
  for (std::size_t i = ranges_.size(); i-- > 0;) {
    const std::uint64_t n = ranges_[i].size();
    a[vars_[i]] = mpz_class(std::to_string(ranges_[i].lo + static_cast<std::int64_t>(index % n)));
    index /= n;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Chunked parallel driver

SearchResult run_tuples(const TupleSolver& solver, const TupleSpace& space, std::uint64_t begin,
                        std::uint64_t end, const SearchBounds& bounds) {
  SearchResult result;
  result.total = space.size();
  end = std::min(end, space.size());
  begin = std::min(begin, end);
  result.begin = begin;
  if (bounds.node_budget && end - begin > *bounds.node_budget) {
    end = begin + *bounds.node_budget;
    result.exhausted = true;
  }

  const unsigned workers = std::max(1u, bounds.workers);
  const std::uint64_t span = end - begin;
  const std::uint64_t chunk = std::clamp<std::uint64_t>(span / (workers * 8ULL), 1, 256);
  const std::uint64_t chunks = span == 0 ? 0 : (span + chunk - 1) / chunk;

  struct ChunkOut {
    std::vector<SolutionRecord> records;
    std::vector<PrunedTuple> pruned;
    std::vector<std::string> warnings;
    bool done = false;
  };
  std::vector<ChunkOut> outs(chunks);
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mu;
  const auto deadline = bounds.wall_seconds
                            ? std::optional(std::chrono::steady_clock::now() +
                                            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                std::chrono::duration<double>(*bounds.wall_seconds)))
                            : std::nullopt;

  auto work = [&] {
    while (!stop.load()) {
      if ((deadline && std::chrono::steady_clock::now() >= *deadline) ||
          (bounds.cancel && bounds.cancel->load())) {
        stop = true;
        break;
      }
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) break;
      ChunkOut& out = outs[c];
      try {
        const std::uint64_t lo = begin + c * chunk;
        const std::uint64_t hi = std::min(end, lo + chunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
          model::Assignment tuple = space.at(i);
          TupleOutcome o = solver.solve(tuple);
          if (o.prune) out.pruned.push_back(PrunedTuple{i, std::move(tuple), *o.prune});
          for (auto& r : o.records) out.records.push_back(std::move(r));
          for (auto& w : o.warnings) out.warnings.push_back(std::move(w));
        }
        out.done = true;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };

  if (workers == 1 || chunks <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  // chunks are handed out in order, so the finished ones form a prefix
  std::uint64_t done = 0;
  while (done < chunks && outs[done].done) ++done;
  for (std::uint64_t c = 0; c < done; ++c) {
    for (auto& r : outs[c].records) result.records.push_back(std::move(r));
    for (auto& p : outs[c].pruned) result.pruned.push_back(std::move(p));
    for (auto& w : outs[c].warnings) {
      if (std::find(result.warnings.begin(), result.warnings.end(), w) == result.warnings.end()) {
        result.warnings.push_back(std::move(w));
      }
    }
  }
  result.end = std::min(end, begin + done * chunk);
  if (result.end < end) result.exhausted = true;
  return result;
}

// ---------------------------------------------------------------------------
// Integer roots

namespace {

mpz_class cauchy_bound(const std::vector<mpz_class>& p) {
  mpz_class m = 0;
  for (std::size_t i = 1; i < p.size(); ++i) m = std::max(m, mpz_class(abs(p[i])));
  mpz_class q;
  const mpz_class lead = abs(p[0]);
  mpz_cdiv_q(q.get_mpz_t(), m.get_mpz_t(), lead.get_mpz_t());
  return q + 1;
}

std::vector<mpz_class> trim(std::vector<mpz_class> p) {
  std::size_t lead = 0;
  while (lead + 1 < p.size() && p[lead] == 0) ++lead;
  p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(lead));
  return p;
}

void sort_unique(std::vector<mpz_class>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Integer points splitting the line into pieces where p is monotone: between
// consecutive points at distance >= 2 the derivative has no real root. Built
// from the points of p' by locating each sign change of p' to a unit interval.
std::vector<mpz_class> monotone_breakpoints(const std::vector<mpz_class>& p) {
  if (p.size() <= 2) return {};
  const auto dp = model::derivative(p);
  std::vector<mpz_class> grid = monotone_breakpoints(dp);
  const mpz_class c = cauchy_bound(dp);
  grid.push_back(-c);
  grid.push_back(c);
  sort_unique(grid);
  std::vector<mpz_class> out = grid;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const int su = sgn(model::horner(dp, grid[i]));
    const int sv = sgn(model::horner(dp, grid[i + 1]));
    if (su == 0 || sv == 0 || su == sv) continue;
    mpz_class lo = grid[i], hi = grid[i + 1];
    while (hi - lo > 1) {
      mpz_class mid = (lo + hi) / 2;
      const int sm = sgn(model::horner(dp, mid));
      if (sm == 0) {
        lo = hi = mid;
        break;
      }
      (sm == su ? lo : hi) = mid;
    }
    out.push_back(lo);
    out.push_back(hi);
  }
  sort_unique(out);
  return out;
}

}  // namespace

IntegerRootFinder::IntegerRootFinder(std::vector<mpz_class> leading_first)
    : poly_(trim(std::move(leading_first))) {
  breakpoints_ = monotone_breakpoints(poly_);
}

std::vector<mpz_class> IntegerRootFinder::solve(const mpz_class& target) const {
  std::vector<mpz_class> g = poly_;
  g.back() -= target;
  std::vector<mpz_class> roots;
  if (g.size() == 1) {
    if (g[0] == 0) fail(ErrorKind::InvalidArgument, "constant polynomial equals target everywhere");
    return roots;
  }
  if (g.size() == 2) {
    if (g[1] % g[0] == 0) roots.push_back(-g[1] / g[0]);
    return roots;
  }
  const mpz_class c = cauchy_bound(g);
  std::vector<mpz_class> points{-c, c};
  for (const auto& b : breakpoints_) {
    if (b > -c && b < c) points.push_back(b);
  }
  sort_unique(points);
  std::vector<int> signs;
  for (const auto& pt : points) signs.push_back(sgn(model::horner(g, pt)));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (signs[i] == 0) roots.push_back(points[i]);
    if (i + 1 == points.size()) break;
    const int su = signs[i], sv = signs[i + 1];
    if (su == 0 || sv == 0 || su == sv) continue;
    // g is strictly monotone on the integers of this piece
    mpz_class lo = points[i], hi = points[i + 1];
    while (hi - lo > 1) {
      mpz_class mid = (lo + hi) / 2;
      const int sm = sgn(model::horner(g, mid));
      if (sm == 0) {
        roots.push_back(mid);
        break;
      }
      (sm == su ? lo : hi) = mid;
    }
  }
  sort_unique(roots);
  return roots;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

SolutionRecord make_record(const std::string& equation, const model::Assignment& tuple,
                           const mpz_class& x, const std::optional<mpz_class>& y) {
  SolutionRecord r;
  r.equation = equation;
  r.assignment = tuple;
  r.assignment["x"] = x;
  if (y) r.assignment["y"] = *y;
  r.verified = true;
  r.certificate = ExactEquality{};
  return r;
}

void sort_records(std::vector<SolutionRecord>& records) {
  auto key = [](const SolutionRecord& r, const char* var) {
    auto it = r.assignment.find(var);
    return it == r.assignment.end() ? mpz_class(0) : it->second;
  };
  std::stable_sort(records.begin(), records.end(), [&](const SolutionRecord& a, const SolutionRecord& b) {
    const mpz_class ax = key(a, "x"), bx = key(b, "x");
    if (ax != bx) return ax < bx;
    return key(a, "y") < key(b, "y");
  });
}

model::Equation equation_with_rhs(const model::FactorialProductLHS& lhs, model::BivariatePoly rhs,
                                  bool coprime) {
  model::Equation eq;
  eq.lhs = lhs;
  eq.rhs.poly = std::move(rhs);
  if (!eq.rhs.poly.uses_y()) {
    eq.rhs.kind = model::RhsKind::Univariate;
  } else if (eq.rhs.poly.is_homogeneous() && eq.rhs.poly.total_degree() >= 2 && eq.rhs.poly.uses_x()) {
    eq.rhs.kind = model::RhsKind::BinaryForm;
  } else {
    eq.rhs.kind = model::RhsKind::Bivariate;
  }
  eq.constraints.coprime = coprime;
  return eq;
}

std::optional<PruneCertificate> bertrand(const model::FactorialProductLHS& lhs,
                                         const model::Assignment& tuple, unsigned long d,
                                         const mpz_class& extra) {
  if (d < 2 || lhs.factorials.empty()) return std::nullopt;
  for (const auto& f : lhs.factorials) {
    if (f.kind == model::FactorialKind::Bhargava && f.set.is_truncation()) return std::nullopt;
  }
  // the factorial arguments are the only thresholds of v_q for q in (n*/2, n*)
  std::vector<mpz_class> args;
  for (const auto& f : lhs.factorials) {
    auto it = tuple.find(f.var);
    if (it == tuple.end()) fail(ErrorKind::Unbound, "unbound variable '" + f.var + "'");
    args.push_back(it->second);
  }
  sort_unique(args);
  const mpz_class nstar = args.back();
  const mpz_class cmax = std::max(lhs.max_constant(), mpz_class(abs(extra)));
  if (nstar <= 2 * cmax || !nstar.fits_ulong_p()) return std::nullopt;
  const std::uint64_t top = nstar.get_ui();
  std::uint64_t floor_lo = std::max<std::uint64_t>(top / 2, cmax.get_ui());
  // segments (t_{j-1}, t_j] on which v_q is constant
  std::uint64_t prev = floor_lo;
  for (const auto& a : args) {
    if (a <= prev) continue;
    const std::uint64_t t = a.get_ui();
    // primes in (prev, t] intersected with (n*/2, n*)
    const std::uint64_t hi = std::min(t, top - 1);
    if (hi > prev) {
      if (auto q = arith::prime_in_interval(prev, hi + 1)) {
        const mpz_class v = arith::factorial_product_valuation(lhs, tuple, *q);
        if (mpz_class(v % d) != 0) {
          return PruneCertificate{PruneCertificate::Kind::Bertrand, *q, v, d};
        }
      }
    }
    prev = t;
  }
  return std::nullopt;
}

}  // namespace detail

std::optional<PruneCertificate> prune_bertrand(const model::FactorialProductLHS& lhs,
                                               const model::Assignment& tuple, unsigned long d) {
  return detail::bertrand(lhs, tuple, d, 0);
}

// ---------------------------------------------------------------------------
// a * x^d = LHS

namespace {

class PowerSolver final : public TupleSolver {
 public:
  PowerSolver(const model::Equation& eq, bool prune)
      : eq_(eq), text_(model::print_equation(eq)), prune_(prune) {
    const auto& terms = eq.rhs.poly.terms();
    if (terms.size() != 1 || terms.begin()->first.second != 0) {
      fail(ErrorKind::Internal, "power solver needs a monomial a*x^d");
    }
    d_ = terms.begin()->first.first;
    a_ = terms.begin()->second;
  }

  std::string method() const override { return "power"; }

  TupleOutcome solve(const model::Assignment& tuple) const override {
    TupleOutcome out;
    if (prune_) {
      if (auto cert = detail::bertrand(eq_.lhs, tuple, d_, a_)) {
        out.prune = cert;
        return out;
      }
    }
    const mpz_class n = model::eval_lhs(eq_.lhs, tuple);
    if (d_ == 1) {
      out.warnings.push_back("degree 1: every tuple with a | LHS is a solution");
      if (n % a_ == 0) out.records.push_back(detail::make_record(text_, tuple, n / a_, std::nullopt));
      return out;
    }
    if (n % a_ != 0) return out;
    const mpz_class target = n / a_;
    if (target < 0 && d_ % 2 == 0) return out;
    const auto root = arith::integer_nth_root(abs(target), d_);
    if (!root.exact) return out;
    if (target < 0) {
      out.records.push_back(detail::make_record(text_, tuple, -root.root, std::nullopt));
    } else if (d_ % 2 == 0 && root.root != 0) {
      out.records.push_back(detail::make_record(text_, tuple, -root.root, std::nullopt));
      out.records.push_back(detail::make_record(text_, tuple, root.root, std::nullopt));
    } else {
      out.records.push_back(detail::make_record(text_, tuple, root.root, std::nullopt));
    }
    return out;
  }

 private:
  model::Equation eq_;
  std::string text_;
  bool prune_;
  unsigned long d_ = 1;
  mpz_class a_ = 1;
};

class UnivariateSolver final : public TupleSolver {
 public:
  UnivariateSolver(const model::Equation& eq, const SearchBounds& bounds)
      : eq_(eq), text_(model::print_equation(eq)), finder_(eq.rhs.poly.in_x_at(0)) {
    if (const Range* r = bounds.find("x")) x_range_ = *r;
    if (eq.rhs.poly.total_degree() == 0) fail(ErrorKind::InvalidArgument, "right-hand side is constant");
  }

  std::string method() const override { return "univariate"; }

  TupleOutcome solve(const model::Assignment& tuple) const override {
    TupleOutcome out;
    const mpz_class n = model::eval_lhs(eq_.lhs, tuple);
    for (const auto& x : finder_.solve(n)) {
      if (x_range_ && !x_range_->contains(x)) continue;
      out.records.push_back(detail::make_record(text_, tuple, x, std::nullopt));
    }
    return out;
  }

 private:
  model::Equation eq_;
  std::string text_;
  IntegerRootFinder finder_;
  std::optional<Range> x_range_;
};

}  // namespace

namespace detail {

std::unique_ptr<TupleSolver> make_power_solver(const model::Equation& eq, bool prune) {
  return std::make_unique<PowerSolver>(eq, prune);
}

std::unique_ptr<TupleSolver> make_univariate_solver(const model::Equation& eq, const SearchBounds& bounds) {
  return std::make_unique<UnivariateSolver>(eq, bounds);
}

}  // namespace detail

SearchResult search_power(const model::FactorialProductLHS& lhs, unsigned long d,
                          const SearchBounds& bounds) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "power must be >= 1");
  const auto eq = detail::equation_with_rhs(lhs, model::BivariatePoly({{{static_cast<unsigned>(d), 0u}, 1}}), false);
  const auto solver = detail::make_power_solver(eq, bounds.prune);
  const auto space = TupleSpace::for_lhs(lhs, bounds);
  return run_tuples(*solver, space, 0, space.size(), bounds);
}

SearchResult solve_univariate(const model::Equation& eq, const SearchBounds& bounds) {
  if (eq.rhs.poly.uses_y()) fail(ErrorKind::InvalidArgument, "right-hand side is not univariate");
  const auto solver = detail::make_univariate_solver(eq, bounds);
  const auto space = TupleSpace::for_lhs(eq.lhs, bounds);
  return run_tuples(*solver, space, 0, space.size(), bounds);
}

}  // namespace pfde::solver
