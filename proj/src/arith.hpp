#pragma once

// Exact integer kernels shared by every other module: primes, valuations,
// factoring, radicals, integer roots and discriminants.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pfde::arith {

// Largest sieve the library will build in one piece.
inline constexpr std::uint64_t kMaxSieveLimit = std::uint64_t{1} << 32;

/// Immutable list of every prime <= limit, ascending.
class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes)
      : limit_(limit), primes_(std::move(primes)) {}

  std::uint64_t limit() const noexcept { return limit_; }
  const std::vector<std::uint64_t>& primes() const noexcept { return primes_; }
  std::size_t size() const noexcept { return primes_.size(); }
  bool contains(std::uint64_t n) const;

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> primes_;
};

PrimeTable sieve_primes(std::uint64_t limit);

// Shared table used for trial division (primes below 2^20).
const PrimeTable& small_primes();

/// Deterministic Miller-Rabin for the whole 64-bit range.
bool is_prime(std::uint64_t n);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Jacobi symbol (a/n) for odd n > 0.
int jacobi(std::uint64_t a, std::uint64_t n);

/// Smallest prime p with lo < p < hi, or nullopt.
std::optional<std::uint64_t> prime_in_interval(std::uint64_t lo, std::uint64_t hi);

/// v_p(n!) by Legendre's formula. Throws InvalidArgument for non-prime p.
std::uint64_t legendre_valuation(std::uint64_t n, std::uint64_t p);
mpz_class legendre_valuation(const mpz_class& n, std::uint64_t p);

/// v_p(m) for nonzero m.
std::uint64_t valuation(const mpz_class& m, std::uint64_t p);
std::uint64_t valuation(const mpz_class& m, const mpz_class& p);

struct PrimePower {
  mpz_class prime;
  unsigned exponent = 0;
};

struct Factorization {
  int sign = 1;
  std::vector<PrimePower> factors;  // primes strictly increasing

  mpz_class reconstruct() const;
};

struct FactorBudget {
  std::uint64_t trial_bound = std::uint64_t{1} << 20;
  std::uint64_t rho_iterations = std::uint64_t{1} << 22;
};

/// Trial division, then Pollard-Brent rho. Throws FactoringBudgetError.
Factorization factorize(const mpz_class& m, const FactorBudget& budget = {});

/// Product of the distinct primes dividing m; radical(+-1) = 1.
mpz_class radical(const mpz_class& m, const FactorBudget& budget = {});

/// Product of all primes <= n.
mpz_class primorial(std::uint64_t n);

struct NthRoot {
  mpz_class root;
  bool exact = false;
};

/// floor(m^(1/d)) for m >= 0, d >= 1.
NthRoot integer_nth_root(const mpz_class& m, unsigned long d);

/// Resultant of two integer polynomials (coefficients leading first) via a
/// fraction-free determinant of the Sylvester matrix.
mpz_class resultant(std::span<const mpz_class> f, std::span<const mpz_class> g);

/// Discriminant (-1)^(d(d-1)/2) Res(f, f') / a_d; coefficients leading first.
mpz_class discriminant(std::span<const mpz_class> f);

/// Delta(f(x,1)) / gcd(coeffs)^(2n-2) for a binary form of degree n with
/// coefficients listed by descending power of x (a_n first).
mpq_class modified_discriminant(std::span<const mpz_class> form);

mpz_class factorial(std::uint64_t n);

}  // namespace pfde::arith
