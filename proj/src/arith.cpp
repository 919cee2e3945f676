#include "arith.hpp"

#include <algorithm>
#include <map>

#include "errors.hpp"

namespace pfde::arith {

bool PrimeTable::contains(std::uint64_t n) const {
  return std::binary_search(primes_.begin(), primes_.end(), n);
}

PrimeTable sieve_primes(std::uint64_t limit) {
  if (limit > kMaxSieveLimit) {
    fail(ErrorKind::ResourceLimit,
         "sieve limit " + std::to_string(limit) + " exceeds memory budget " +
             std::to_string(kMaxSieveLimit));
  }
  std::vector<std::uint64_t> primes;
  if (limit < 2) return PrimeTable(limit, std::move(primes));

  // odd-only sieve: index i stands for 2i+1
  const std::uint64_t half = (limit - 1) / 2 + 1;
  std::vector<bool> composite(half, false);
  primes.push_back(2);
  for (std::uint64_t i = 1; i < half; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    primes.push_back(p);
    for (std::uint64_t j = (p * p) / 2; j < half; j += p) composite[j] = true;
  }
  return PrimeTable(limit, std::move(primes));
}

const PrimeTable& small_primes() {
  static const PrimeTable table = sieve_primes(std::uint64_t{1} << 20);
  return table;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // this witness set is deterministic below 2^64
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

int jacobi(std::uint64_t a, std::uint64_t n) {
  if (n == 0 || (n & 1) == 0) fail(ErrorKind::InvalidArgument, "jacobi: n must be odd");
  a %= n;
  int result = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      const std::uint64_t r = n & 7;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

std::optional<std::uint64_t> prime_in_interval(std::uint64_t lo, std::uint64_t hi) {
  if (lo >= hi) fail(ErrorKind::InvalidArgument, "prime_in_interval requires lo < hi");
  for (std::uint64_t p = lo + 1; p < hi; ++p) {
    if (is_prime(p)) return p;
  }
  return std::nullopt;
}

std::uint64_t legendre_valuation(std::uint64_t n, std::uint64_t p) {
  if (!is_prime(p)) {
    fail(ErrorKind::InvalidArgument, std::to_string(p) + " is not prime");
  }
  std::uint64_t total = 0;
  while (n > 0) {
    n /= p;
    total += n;
  }
  return total;
}

mpz_class legendre_valuation(const mpz_class& n, std::uint64_t p) {
  if (!is_prime(p)) {
    fail(ErrorKind::InvalidArgument, std::to_string(p) + " is not prime");
  }
  if (n < 0) fail(ErrorKind::InvalidArgument, "factorial of a negative number");
  mpz_class total = 0;
  mpz_class q = n;
  while (q > 0) {
    mpz_fdiv_q_ui(q.get_mpz_t(), q.get_mpz_t(), p);
    total += q;
  }
  return total;
}

std::uint64_t valuation(const mpz_class& m, std::uint64_t p) {
  return valuation(m, mpz_class(static_cast<unsigned long>(p)));
}

std::uint64_t valuation(const mpz_class& m, const mpz_class& p) {
  if (m == 0) fail(ErrorKind::InvalidArgument, "valuation of zero");
  if (p < 2) fail(ErrorKind::InvalidArgument, "valuation base must be >= 2");
  mpz_class rest;
  return mpz_remove(rest.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t());
}

mpz_class Factorization::reconstruct() const {
  mpz_class value = 1;
  for (const auto& f : factors) {
    mpz_class power;
    mpz_pow_ui(power.get_mpz_t(), f.prime.get_mpz_t(), f.exponent);
    value *= power;
  }
  return sign < 0 ? mpz_class(-value) : value;
}

namespace {

// Pollard rho with Brent's cycle detection; returns a nontrivial factor or 0.
mpz_class brent_rho(const mpz_class& n, unsigned long c, std::uint64_t& iterations_left) {
  auto step = [&](const mpz_class& v) {
    mpz_class r = v * v + c;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
    return r;
  };
  mpz_class y = 2, x, ys, q = 1, g = 1;
  std::uint64_t r = 1;
  const std::uint64_t batch = 128;
  while (g == 1) {
    x = y;
    for (std::uint64_t i = 0; i < r; ++i) y = step(y);
    std::uint64_t k = 0;
    while (k < r && g == 1) {
      ys = y;
      const std::uint64_t lim = std::min(batch, r - k);
      for (std::uint64_t i = 0; i < lim; ++i) {
        y = step(y);
        mpz_class diff = x - y;
        q = q * abs(diff);
        mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += lim;
      if (iterations_left < lim) return 0;
      iterations_left -= lim;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = step(ys);
      mpz_class diff = x - ys;
      mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  if (g == n) return 0;
  return g;
}

bool probably_prime(const mpz_class& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

void split_cofactor(const mpz_class& n, std::map<mpz_class, unsigned>& out,
                    std::uint64_t& iterations_left) {
  if (n == 1) return;
  if (probably_prime(n)) {
    ++out[n];
    return;
  }
  NthRoot sq = integer_nth_root(n, 2);
  if (sq.exact) {
    split_cofactor(sq.root, out, iterations_left);
    split_cofactor(sq.root, out, iterations_left);
    return;
  }
  for (unsigned long c = 1; c < 64; ++c) {
    mpz_class f = brent_rho(n, c, iterations_left);
    if (f != 0) {
      split_cofactor(f, out, iterations_left);
      split_cofactor(mpz_class(n / f), out, iterations_left);
      return;
    }
    if (iterations_left == 0) break;
  }
  throw FactoringBudgetError(n.get_str());
}

}  // namespace

Factorization factorize(const mpz_class& m, const FactorBudget& budget) {
  if (m == 0) fail(ErrorKind::InvalidArgument, "cannot factorize zero");
  Factorization result;
  result.sign = m < 0 ? -1 : 1;
  mpz_class rest = abs(m);
  std::map<mpz_class, unsigned> found;

  const PrimeTable& table = small_primes();
  for (std::uint64_t p : table.primes()) {
    if (p > budget.trial_bound) break;
    if (rest == 1) break;
    mpz_class pp = static_cast<unsigned long>(p);
    if (pp * pp > rest) break;
    if (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      unsigned e = static_cast<unsigned>(
          mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), pp.get_mpz_t()));
      found[pp] += e;
    }
  }
  if (rest != 1) {
    const mpz_class bound = static_cast<unsigned long>(
        std::min<std::uint64_t>(budget.trial_bound, table.limit()));
    if (rest <= bound * bound) {
      ++found[rest];  // no factor below sqrt(rest)
    } else {
      std::uint64_t iterations = budget.rho_iterations;
      split_cofactor(rest, found, iterations);
    }
  }
  for (auto& [p, e] : found) result.factors.push_back({p, e});
  return result;
}

mpz_class radical(const mpz_class& m, const FactorBudget& budget) {
  mpz_class r = 1;
  for (const auto& f : factorize(m, budget).factors) r *= f.prime;
  return r;
}

mpz_class primorial(std::uint64_t n) {
  mpz_class r;
  mpz_primorial_ui(r.get_mpz_t(), n);
  return r;
}

mpz_class factorial(std::uint64_t n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

NthRoot integer_nth_root(const mpz_class& m, unsigned long d) {
  if (m < 0) fail(ErrorKind::InvalidArgument, "integer_nth_root of a negative number");
  if (d == 0) fail(ErrorKind::InvalidArgument, "integer_nth_root with d = 0");
  NthRoot r;
  r.exact = mpz_root(r.root.get_mpz_t(), m.get_mpz_t(), d) != 0;
  return r;
}

namespace {

// Bareiss fraction-free elimination; exact integer determinant.
mpz_class bareiss_determinant(std::vector<std::vector<mpz_class>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && a[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(a[k], a[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class v = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a[i][j] = v;
      }
    }
    prev = a[k][k];
  }
  return sign < 0 ? mpz_class(-a[n - 1][n - 1]) : a[n - 1][n - 1];
}

std::span<const mpz_class> trim_leading_zeros(std::span<const mpz_class> f) {
  std::size_t i = 0;
  while (i < f.size() && f[i] == 0) ++i;
  return f.subspan(i);
}

}  // namespace

mpz_class resultant(std::span<const mpz_class> f_in, std::span<const mpz_class> g_in) {
  auto f = trim_leading_zeros(f_in);
  auto g = trim_leading_zeros(g_in);
  if (f.empty() || g.empty()) fail(ErrorKind::InvalidArgument, "resultant of zero polynomial");
  const std::size_t m = f.size() - 1;
  const std::size_t n = g.size() - 1;
  const std::size_t size = m + n;
  if (size == 0) return 1;
  std::vector<std::vector<mpz_class>> s(size, std::vector<mpz_class>(size, 0));
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t i = 0; i <= m; ++i) s[row][row + i] = f[i];
  }
  for (std::size_t row = 0; row < m; ++row) {
    for (std::size_t i = 0; i <= n; ++i) s[n + row][row + i] = g[i];
  }
  return bareiss_determinant(std::move(s));
}

mpz_class discriminant(std::span<const mpz_class> f_in) {
  auto f = trim_leading_zeros(f_in);
  if (f.empty()) fail(ErrorKind::InvalidArgument, "discriminant of the zero polynomial");
  const std::size_t d = f.size() - 1;
  if (d < 1) fail(ErrorKind::InvalidArgument, "discriminant needs degree >= 1");
  if (d == 1) return 1;
  std::vector<mpz_class> derivative(d);
  for (std::size_t i = 0; i < d; ++i) {
    derivative[i] = f[i] * static_cast<unsigned long>(d - i);
  }
  mpz_class res = resultant(f, derivative);
  mpz_divexact(res.get_mpz_t(), res.get_mpz_t(), f[0].get_mpz_t());
  if ((d * (d - 1) / 2) % 2 == 1) res = -res;
  return res;
}

mpq_class modified_discriminant(std::span<const mpz_class> form) {
  if (form.size() < 3) fail(ErrorKind::InvalidArgument, "modified discriminant needs form degree >= 2");
  const std::size_t n = form.size() - 1;
  // f(x,1) has the same coefficient list, possibly with vanishing leading terms
  auto dehomogenized = trim_leading_zeros(form);
  if (dehomogenized.size() < 2) {
    fail(ErrorKind::InvalidArgument, "degenerate form: f(x,1) is constant");
  }
  mpz_class g = 0;
  for (const auto& a : form) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  mpz_class denom;
  mpz_pow_ui(denom.get_mpz_t(), g.get_mpz_t(), 2 * n - 2);
  mpq_class result(discriminant(dehomogenized), denom);
  result.canonicalize();
  return result;
}

}  // namespace pfde::arith
