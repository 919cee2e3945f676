#include <algorithm>
#include <mutex>
#include <set>
#include <unordered_map>

#include "arith.hpp"
#include "errors.hpp"
#include "search_internal.hpp"
#include "valuation.hpp"

namespace pfde::solver {

namespace {

// Largest q for which the residue scan of f(x,1) mod q is attempted.
constexpr std::uint64_t kMaxResidueScan = 1'000'000;

std::uint64_t mod_u64(const mpz_class& v, std::uint64_t q) {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), q);
  return r.get_ui();
}

bool has_root_mod(const std::vector<mpz_class>& poly, std::uint64_t q) {
  std::vector<std::uint64_t> c;
  for (const auto& a : poly) c.push_back(mod_u64(a, q));
  for (std::uint64_t x = 0; x < q; ++x) {
    std::uint64_t acc = 0;
    for (std::uint64_t a : c) acc = (arith::mulmod(acc, x, q) + a) % q;
    if (acc == 0) return true;
  }
  return false;
}

// q odd prime, q does not divide a_d or the modified discriminant, and f(x,1)
// has no root mod q.
bool form_prime_qualifies(const model::BinaryForm& f, std::uint64_t q) {
  if (q < 3 || q > kMaxResidueScan || !arith::is_prime(q)) return false;
  if (mod_u64(f.leading_x(), q) == 0) return false;
  mpq_class disc;
  try {
    disc = arith::modified_discriminant(f.coeffs);
  } catch (const Error&) {
    return false;
  }
  if (disc == 0) return false;
  if (mod_u64(disc.get_num(), q) == 0) return false;
  return !has_root_mod(f.dehomogenized(), q);
}

const Range& need_range(const SearchBounds& bounds, const char* var, const char* what) {
  const Range* r = bounds.find(var);
  if (!r) fail(ErrorKind::InvalidArgument, std::string(what) + " needs a range for " + var);
  return *r;
}

// Integer x with P(x) = n for the polynomial in x obtained by fixing y.
std::vector<mpz_class> solve_in_x(const std::vector<mpz_class>& coeffs, const mpz_class& n,
                                  const std::optional<Range>& x_range, bool* unbounded) {
  std::vector<mpz_class> p = coeffs;
  while (p.size() > 1 && p.front() == 0) p.erase(p.begin());
  std::vector<mpz_class> xs;
  if (p.size() == 1) {
    if (p[0] != n) return xs;
    if (!x_range) {
      *unbounded = true;
      return xs;
    }
    for (std::int64_t x = x_range->lo; x <= x_range->hi; ++x) xs.emplace_back(std::to_string(x));
    return xs;
  }
  for (auto& x : IntegerRootFinder(p).solve(n)) {
    if (!x_range || x_range->contains(x)) xs.push_back(std::move(x));
  }
  return xs;
}

mpz_class from_i64(std::int64_t v) { return mpz_class(std::to_string(v)); }

// ---------------------------------------------------------------------------

class RowSolver : public TupleSolver {
 public:
  RowSolver(const model::Equation& eq, const SearchBounds& bounds, bool coprime_only, const char* what)
      : eq_(eq), text_(model::print_equation(eq)), coprime_(coprime_only),
        y_range_(need_range(bounds, "y", what)) {
    if (const Range* r = bounds.find("x")) x_range_ = *r;
  }

 protected:
  void rows(const model::Assignment& tuple, const mpz_class& n, TupleOutcome& out) const {
    bool unbounded = false;
    for (std::int64_t yi = y_range_.lo; yi <= y_range_.hi; ++yi) {
      const mpz_class y = from_i64(yi);
      for (const auto& x : solve_in_x(eq_.rhs.poly.in_x_at(y), n, x_range_, &unbounded)) {
        if (coprime_ && gcd(x, y) != 1) continue;
        out.records.push_back(detail::make_record(text_, tuple, x, y));
      }
    }
    if (unbounded) out.warnings.push_back("some rows are constant in x; give a range for x to enumerate them");
    detail::sort_records(out.records);
  }

  model::Equation eq_;
  std::string text_;
  bool coprime_;
  Range y_range_;
  std::optional<Range> x_range_;
};

class FormSolver final : public RowSolver {
 public:
  FormSolver(const model::Equation& eq, const SearchBounds& bounds, bool coprime_only)
      : RowSolver(eq, bounds, coprime_only, "binary form search"), form_(eq.rhs.form()),
        prune_(bounds.prune) {}

  std::string method() const override { return "binary_form"; }

  TupleOutcome solve(const model::Assignment& tuple) const override {
    TupleOutcome out;
    if (prune_) {
      if (auto cert = find_prune(tuple)) {
        out.prune = cert;
        return out;
      }
    }
    rows(tuple, model::eval_lhs(eq_.lhs, tuple), out);
    return out;
  }

 private:
  std::optional<PruneCertificate> find_prune(const model::Assignment& tuple) const {
    for (const auto& f : eq_.lhs.factorials) {
      if (f.kind == model::FactorialKind::Bhargava && f.set.is_truncation()) return std::nullopt;
    }
    const unsigned long d = form_.degree();
    mpz_class bound = eq_.lhs.max_constant();
    for (const auto& f : eq_.lhs.factorials) bound = std::max(bound, tuple.at(f.var));
    const std::uint64_t top = bound.fits_ulong_p() ? std::min<std::uint64_t>(bound.get_ui(), kMaxResidueScan)
                                                   : kMaxResidueScan;
    for (std::uint64_t q = 3; q <= top; q += 2) {
      if (!arith::is_prime(q)) continue;
      const mpz_class v = arith::factorial_product_valuation(eq_.lhs, tuple, q);
      if (v < 1 || v >= d) continue;
      if (qualifies(q)) return PruneCertificate{PruneCertificate::Kind::NoRootModQ, q, v, d};
    }
    return std::nullopt;
  }

  bool qualifies(std::uint64_t q) const {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(q);
      if (it != cache_.end()) return it->second;
    }
    const bool ok = form_prime_qualifies(form_, q);
    std::lock_guard<std::mutex> lock(mu_);
    cache_[q] = ok;
    return ok;
  }

  model::BinaryForm form_;
  bool prune_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::uint64_t, bool> cache_;
};

class BivariateSolver final : public RowSolver {
 public:
  BivariateSolver(const model::Equation& eq, const SearchBounds& bounds)
      : RowSolver(eq, bounds, eq.constraints.coprime, "bivariate search") {}

  std::string method() const override { return "bivariate"; }

  TupleOutcome solve(const model::Assignment& tuple) const override {
    TupleOutcome out;
    rows(tuple, model::eval_lhs(eq_.lhs, tuple), out);
    return out;
  }
};

// alpha*x^(2s)y^s + beta*y^(2s)x^s = N  <=>  x^(2s)y^s + sigma*y^(2s)x^s = alpha*N
class ProductFormSolver final : public TupleSolver {
 public:
  ProductFormSolver(const model::Equation& eq, const ProductFormShape& shape, const SearchBounds& bounds)
      : eq_(eq), text_(model::print_equation(eq)), shape_(shape) {
    if (const Range* r = bounds.find("x")) x_range_ = *r;
    if (const Range* r = bounds.find("y")) y_range_ = *r;
  }

  std::string method() const override { return "coprime_product_form"; }

  TupleOutcome solve(const model::Assignment& tuple) const override {
    TupleOutcome out;
    const mpz_class n = model::eval_lhs(eq_.lhs, tuple);
    const int sigma = shape_.alpha * shape_.beta;
    std::vector<std::pair<mpz_class, mpz_class>> sols;
    bool grid = false;
    try {
      sols = coprime_product_form_solutions(shape_.s, sigma, n * shape_.alpha);
    } catch (const FactoringBudgetError&) {
      if (!x_range_ || !y_range_) throw;
      grid = true;
      sols = grid_solutions(n);
      out.warnings.push_back("factoring budget exceeded; fell back to a bounded grid");
    }
    for (const auto& [x, y] : sols) {
      if (x_range_ && !x_range_->contains(x)) continue;
      if (y_range_ && !y_range_->contains(y)) continue;
      auto rec = detail::make_record(text_, tuple, x, y);
      if (grid) rec.flags.push_back("grid_fallback");
      out.records.push_back(std::move(rec));
    }
    detail::sort_records(out.records);
    return out;
  }

 private:
  std::vector<std::pair<mpz_class, mpz_class>> grid_solutions(const mpz_class& n) const {
    std::vector<std::pair<mpz_class, mpz_class>> out;
    for (std::int64_t xi = x_range_->lo; xi <= x_range_->hi; ++xi) {
      for (std::int64_t yi = y_range_->lo; yi <= y_range_->hi; ++yi) {
        const mpz_class x = from_i64(xi), y = from_i64(yi);
        if (gcd(x, y) == 1 && eq_.rhs.poly.evaluate(x, y) == n) out.emplace_back(x, y);
      }
    }
    return out;
  }

  model::Equation eq_;
  std::string text_;
  ProductFormShape shape_;
  std::optional<Range> x_range_, y_range_;
};

// Unitary divisors of |n| whose exponents are multiples of s.
void unitary_power_divisors(const arith::Factorization& f, unsigned long s, std::size_t i,
                            const mpz_class& acc, std::vector<mpz_class>& out) {
  if (i == f.factors.size()) {
    out.push_back(acc);
    return;
  }
  unitary_power_divisors(f, s, i + 1, acc, out);
  if (f.factors[i].exponent % s == 0) {
    mpz_class pw;
    mpz_pow_ui(pw.get_mpz_t(), f.factors[i].prime.get_mpz_t(), f.factors[i].exponent);
    unitary_power_divisors(f, s, i + 1, acc * pw, out);
  }
}

// Signed s-th roots of v: every r with r^s = v.
std::vector<mpz_class> signed_roots(const mpz_class& v, unsigned long s) {
  std::vector<mpz_class> out;
  if (v < 0 && s % 2 == 0) return out;
  const auto root = arith::integer_nth_root(abs(v), s);
  if (!root.exact) return out;
  if (v < 0) {
    out.push_back(-root.root);
  } else if (s % 2 == 0 && root.root != 0) {
    out.push_back(-root.root);
    out.push_back(root.root);
  } else {
    out.push_back(root.root);
  }
  return out;
}

}  // namespace

std::optional<PruneCertificate> prune_no_root_mod_q(const model::BinaryForm& f, std::uint64_t q,
                                                    const mpz_class& v) {
  const unsigned long d = f.degree();
  if (v < 1 || v >= d) return std::nullopt;
  if (!form_prime_qualifies(f, q)) return std::nullopt;
  return PruneCertificate{PruneCertificate::Kind::NoRootModQ, q, v, d};
}

std::optional<ProductFormShape> match_product_form(const model::BivariatePoly& poly) {
  const auto& terms = poly.terms();
  if (terms.size() != 2) return std::nullopt;
  auto first = terms.begin();
  auto second = std::next(first);
  // keys are (deg_x, deg_y); the map orders (s, 2s) before (2s, s)
  const auto [ax, ay] = first->first;
  const auto [bx, by] = second->first;
  const unsigned s = ax;
  if (s == 0 || ay != 2 * s || bx != 2 * s || by != s) return std::nullopt;
  if (abs(first->second) != 1 || abs(second->second) != 1) return std::nullopt;
  return ProductFormShape{s, sgn(second->second), sgn(first->second)};
}

std::vector<std::pair<mpz_class, mpz_class>> coprime_product_form_solutions(unsigned long s, int sign,
                                                                            const mpz_class& n) {
  if (s < 1) fail(ErrorKind::InvalidArgument, "s must be >= 1");
  if (sign != 1 && sign != -1) fail(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  std::set<std::pair<mpz_class, mpz_class>> found;
  if (n == 0) fail(ErrorKind::InvalidArgument, "N must be nonzero");
  const auto f = arith::factorize(n);
  std::vector<mpz_class> divisors;
  unitary_power_divisors(f, s, 0, 1, divisors);
  // X*Y*(X + sign*Y) = n with X = x^s, Y = y^s; X is a unitary divisor of |n|
  for (const auto& u : divisors) {
    for (int xs : {1, -1}) {
      if (xs < 0 && s % 2 == 0) continue;
      const mpz_class X = xs * u;
      // sign*X*Y^2 + X^2*Y - n = 0
      const mpz_class a = sign * X;
      const mpz_class disc = X * X * X * X + 4 * a * n;
      if (disc < 0) continue;
      const mpz_class r = sqrt(disc);
      if (r * r != disc) continue;
      for (const mpz_class& num : {mpz_class(-X * X + r), mpz_class(-X * X - r)}) {
        if (num % (2 * a) != 0) continue;
        const mpz_class Y = num / (2 * a);
        if (Y == 0 || gcd(X, Y) != 1) continue;
        if (X * Y * (X + sign * Y) != n) continue;
        for (const auto& x : signed_roots(X, s)) {
          for (const auto& y : signed_roots(Y, s)) found.emplace(x, y);
        }
      }
    }
  }
  return {found.begin(), found.end()};
}

namespace detail {

std::unique_ptr<TupleSolver> make_form_solver(const model::Equation& eq, const SearchBounds& bounds,
                                              bool coprime_only) {
  return std::make_unique<FormSolver>(eq, bounds, coprime_only);
}

std::unique_ptr<TupleSolver> make_product_form_solver(const model::Equation& eq,
                                                      const ProductFormShape& shape,
                                                      const SearchBounds& bounds) {
  return std::make_unique<ProductFormSolver>(eq, shape, bounds);
}

std::unique_ptr<TupleSolver> make_bivariate_solver(const model::Equation& eq, const SearchBounds& bounds) {
  return std::make_unique<BivariateSolver>(eq, bounds);
}

}  // namespace detail

namespace {

SearchResult run_all(const TupleSolver& solver, const model::FactorialProductLHS& lhs,
                     const SearchBounds& bounds) {
  const auto space = TupleSpace::for_lhs(lhs, bounds);
  return run_tuples(solver, space, 0, space.size(), bounds);
}

model::BivariatePoly product_form_poly(unsigned long s, int sign) {
  const auto s32 = static_cast<unsigned>(s);
  return model::BivariatePoly({{{2 * s32, s32}, 1}, {{s32, 2 * s32}, sign}});
}

}  // namespace

SearchResult search_binary_form(const model::Equation& eq, const SearchBounds& bounds, bool coprime_only) {
  if (eq.rhs.kind != model::RhsKind::BinaryForm) {
    fail(ErrorKind::InvalidArgument, "right-hand side is not a binary form");
  }
  const auto solver = detail::make_form_solver(eq, bounds, coprime_only);
  return run_all(*solver, eq.lhs, bounds);
}

SearchResult search_thue_mahler_form(unsigned long s, int sign, const model::FactorialProductLHS& lhs,
                                     const SearchBounds& bounds) {
  if (sign != 1 && sign != -1) fail(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  const auto eq = detail::equation_with_rhs(lhs, product_form_poly(s, sign), true);
  const auto solver = detail::make_product_form_solver(eq, ProductFormShape{s, 1, sign}, bounds);
  return run_all(*solver, lhs, bounds);
}

SearchResult search_special_form_xy(int sign, const model::FactorialProductLHS& lhs,
                                    const SearchBounds& bounds) {
  return search_thue_mahler_form(1, sign, lhs, bounds);
}

SearchResult solve_bivariate(const model::Equation& eq, const SearchBounds& bounds) {
  const auto solver = detail::make_bivariate_solver(eq, bounds);
  return run_all(*solver, eq.lhs, bounds);
}

std::unique_ptr<TupleSolver> make_solver(const model::Equation& eq, const SearchBounds& bounds) {
  switch (eq.rhs.kind) {
    case model::RhsKind::Univariate:
      if (eq.rhs.poly.terms().size() == 1) return detail::make_power_solver(eq, bounds.prune);
      return detail::make_univariate_solver(eq, bounds);
    case model::RhsKind::BinaryForm:
      if (eq.constraints.coprime) {
        if (auto shape = match_product_form(eq.rhs.poly)) {
          return detail::make_product_form_solver(eq, *shape, bounds);
        }
      }
      return detail::make_form_solver(eq, bounds, eq.constraints.coprime);
    case model::RhsKind::Bivariate:
      return detail::make_bivariate_solver(eq, bounds);
  }
  fail(ErrorKind::Internal, "unknown right-hand side kind");
}

SearchResult solve(const model::Equation& eq, const SearchBounds& bounds) {
  const auto solver = make_solver(eq, bounds);
  return run_all(*solver, eq.lhs, bounds);
}

}  // namespace pfde::solver
