#include <doctest.h>

#include <random>

#include "arith.hpp"
#include "errors.hpp"

using namespace pfde;
using namespace pfde::arith;

namespace {

bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint64_t naive_factorial_valuation(std::uint64_t n, std::uint64_t p) {
  std::uint64_t e = 0;
  for (std::uint64_t k = 2; k <= n; ++k) {
    for (std::uint64_t m = k; m % p == 0; m /= p) ++e;
  }
  return e;
}

mpz_class naive_radical(mpz_class m) {
  if (m < 0) m = -m;
  mpz_class r = 1;
  for (mpz_class d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      r *= d;
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) r *= m;
  return r;
}

// coefficients of a * prod (x - r_i), leading first
std::vector<mpz_class> from_roots(const mpz_class& a, const std::vector<mpz_class>& roots) {
  std::vector<mpz_class> p{a};
  for (const auto& r : roots) {
    std::vector<mpz_class> next(p.size() + 1, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i] += p[i];
      next[i + 1] -= p[i] * r;
    }
    p = next;
  }
  return p;
}

}  // namespace

TEST_CASE("sieve agrees with trial division") {
  const auto table = sieve_primes(20000);
  std::vector<std::uint64_t> expect;
  for (std::uint64_t n = 0; n <= 20000; ++n) {
    if (trial_prime(n)) expect.push_back(n);
  }
  CHECK(table.primes() == expect);
  CHECK(sieve_primes(1000000).size() == 78498);
  CHECK(sieve_primes(1).size() == 0);
  CHECK(sieve_primes(2).primes() == std::vector<std::uint64_t>{2});
}

TEST_CASE("oversized sieve is refused") {
  CHECK_THROWS_AS(sieve_primes(kMaxSieveLimit + 1), Error);
}

TEST_CASE("is_prime matches trial division") {
  for (std::uint64_t n = 0; n < 50000; ++n) CHECK(is_prime(n) == trial_prime(n));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    std::uint64_t n = rng() % (std::uint64_t{1} << 40);
    CHECK(is_prime(n) == trial_prime(n));
  }
  // strong pseudoprimes to several small bases
  CHECK_FALSE(is_prime(3215031751ULL));
  CHECK_FALSE(is_prime(3825123056546413051ULL));
  CHECK(is_prime(18446744073709551557ULL));
}

TEST_CASE("jacobi symbol is Euler's criterion for odd primes") {
  for (std::uint64_t p : {3ULL, 5ULL, 7ULL, 101ULL, 1009ULL}) {
    for (std::uint64_t a = 0; a < 2 * p; ++a) {
      const std::uint64_t e = powmod(a % p, (p - 1) / 2, p);
      const int expect = e == 0 ? 0 : (e == 1 ? 1 : -1);
      CHECK(jacobi(a, p) == expect);
    }
  }
  // multiplicative in the modulus
  CHECK(jacobi(2, 15) == jacobi(2, 3) * jacobi(2, 5));
}

TEST_CASE("prime_in_interval is the first prime strictly inside") {
  for (std::uint64_t lo = 0; lo < 300; ++lo) {
    for (std::uint64_t hi = lo + 1; hi < lo + 20; ++hi) {
      std::optional<std::uint64_t> expect;
      for (std::uint64_t k = lo + 1; k < hi; ++k) {
        if (trial_prime(k)) {
          expect = k;
          break;
        }
      }
      CHECK(prime_in_interval(lo, hi) == expect);
    }
  }
  CHECK_THROWS_AS(prime_in_interval(5, 5), Error);
}

TEST_CASE("legendre valuation counts prime factors of n!") {
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 13ULL}) {
    for (std::uint64_t n = 0; n <= 200; ++n) {
      CHECK(legendre_valuation(n, p) == naive_factorial_valuation(n, p));
    }
  }
  CHECK(legendre_valuation(100, 5) == 24);
  CHECK(legendre_valuation(mpz_class("1000000000000000000000"), 5) ==
        mpz_class("249999999999999999997"));
  CHECK_THROWS_AS(legendre_valuation(10, 4), Error);
}

TEST_CASE("valuation of big integers") {
  mpz_class m = 1;
  for (int i = 0; i < 37; ++i) m *= 3;
  m *= 10;
  CHECK(valuation(m, 3) == 37);
  CHECK(valuation(m, 2) == 1);
  CHECK(valuation(m, 7) == 0);
}

TEST_CASE("factorize reconstructs and yields primes") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    mpz_class m = mpz_class(static_cast<unsigned long>(rng() >> 20)) + 1;
    if (i % 3 == 0) m = -m;
    const auto f = factorize(m);
    CHECK(f.reconstruct() == m);
    for (std::size_t j = 0; j < f.factors.size(); ++j) {
      CHECK(mpz_probab_prime_p(f.factors[j].prime.get_mpz_t(), 30) > 0);
      if (j) CHECK(f.factors[j - 1].prime < f.factors[j].prime);
    }
  }
  // product of two 40-bit primes needs rho
  mpz_class p1, p2;
  mpz_nextprime(p1.get_mpz_t(), mpz_class("1099511627776").get_mpz_t());
  mpz_nextprime(p2.get_mpz_t(), p1.get_mpz_t());
  const auto f = factorize(p1 * p2);
  REQUIRE(f.factors.size() == 2);
  CHECK(f.factors[0].prime == p1);
  CHECK(f.factors[1].prime == p2);
  CHECK(factorize(mpz_class(1)).factors.empty());
  CHECK_THROWS_AS(factorize(mpz_class(0)), Error);
}

TEST_CASE("factoring budget reports the cofactor") {
  mpz_class p1, p2;
  mpz_nextprime(p1.get_mpz_t(), mpz_class("1000000000000000000").get_mpz_t());
  mpz_nextprime(p2.get_mpz_t(), p1.get_mpz_t());
  const mpz_class big = p1 * p2;
  FactorBudget tiny{1000, 10};
  try {
    factorize(big, tiny);
    FAIL("expected budget error");
  } catch (const FactoringBudgetError& e) {
    CHECK(e.kind() == ErrorKind::FactoringBudget);
    CHECK(e.cofactor() == big.get_str());
  }
}

TEST_CASE("radical agrees with trial division") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    mpz_class m = mpz_class(static_cast<unsigned long>(rng() % 2000000)) + 1;
    CHECK(radical(m) == naive_radical(m));
  }
  CHECK(radical(mpz_class(1)) == 1);
  CHECK(radical(mpz_class(-72)) == 6);
}

TEST_CASE("primorial and factorial") {
  CHECK(primorial(1) == 1);
  CHECK(primorial(10) == 210);
  CHECK(primorial(13) == 30030);
  mpz_class f = 1;
  for (unsigned k = 1; k <= 30; ++k) {
    f *= k;
    CHECK(factorial(k) == f);
  }
  CHECK(factorial(0) == 1);
}

TEST_CASE("integer_nth_root is floor of the real root") {
  for (unsigned long d = 1; d <= 5; ++d) {
    for (unsigned long m = 0; m < 3000; ++m) {
      unsigned long r = 0;
      while (true) {
        mpz_class next;
        mpz_ui_pow_ui(next.get_mpz_t(), r + 1, d);
        if (next > m) break;
        ++r;
      }
      mpz_class rd;
      mpz_ui_pow_ui(rd.get_mpz_t(), r, d);
      const auto got = integer_nth_root(mpz_class(m), d);
      CHECK(got.root == r);
      CHECK(got.exact == (rd == m));
    }
  }
}

TEST_CASE("discriminant equals the product of squared root differences") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t deg = 1 + rng() % 5;
    const mpz_class a = static_cast<long>(rng() % 5) + 1;
    std::vector<mpz_class> roots;
    for (std::size_t i = 0; i < deg; ++i) roots.push_back(static_cast<long>(rng() % 13) - 6);
    const auto f = from_roots(a, roots);
    mpz_class expect = 1;
    for (std::size_t i = 0; i < deg; ++i) {
      for (std::size_t j = i + 1; j < deg; ++j) expect *= (roots[i] - roots[j]) * (roots[i] - roots[j]);
    }
    if (deg >= 2) {
      mpz_class lead;
      mpz_pow_ui(lead.get_mpz_t(), a.get_mpz_t(), 2 * deg - 2);
      expect *= lead;
    } else {
      expect = 1;
    }
    CHECK(discriminant(f) == expect);
  }
  const std::vector<mpz_class> quad{1, 0, 1};  // x^2 + 1
  CHECK(discriminant(quad) == -4);
  const std::vector<mpz_class> cubic{1, 0, -2, 5};  // -4p^3 - 27q^2
  CHECK(discriminant(cubic) == -4 * (-8) - 27 * 25);
}

TEST_CASE("resultant is the product of g over the roots of monic f") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<mpz_class> roots;
    for (int i = 0; i < 3; ++i) roots.push_back(static_cast<long>(rng() % 9) - 4);
    const auto f = from_roots(1, roots);
    const std::vector<mpz_class> g{static_cast<long>(rng() % 5) + 1, static_cast<long>(rng() % 7) - 3,
                                   static_cast<long>(rng() % 7) - 3};
    mpz_class expect = 1;
    for (const auto& r : roots) expect *= g[0] * r * r + g[1] * r + g[2];
    CHECK(resultant(f, g) == expect);
  }
}

TEST_CASE("modified discriminant of binary forms") {
  const std::vector<mpz_class> sum_sq{1, 0, 1};
  CHECK(modified_discriminant(sum_sq) == -4);
  const std::vector<mpz_class> scaled{2, 0, 2};  // gcd 2, degree 2: divide by 2^2
  CHECK(modified_discriminant(scaled) == -4);
  const std::vector<mpz_class> cubes{1, 0, 0, 1};
  CHECK(modified_discriminant(cubes) == -27);
}
