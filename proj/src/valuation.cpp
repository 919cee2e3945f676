#include "valuation.hpp"

#include "arith.hpp"
#include "errors.hpp"

namespace pfde::arith {

namespace {

const mpz_class& lookup(const model::Assignment& a, const std::string& var) {
  auto it = a.find(var);
  if (it == a.end()) fail(ErrorKind::Unbound, "variable '" + var + "' is unbound");
  if (it->second < 0) fail(ErrorKind::InvalidArgument, "variable '" + var + "' must be >= 0");
  return it->second;
}

// n!! = 2^(n/2) (n/2)! for even n, and n! / (n-1)!! for odd n
mpz_class double_factorial_valuation(const mpz_class& n, std::uint64_t p) {
  if (n < 2) return 0;
  const bool two = p == 2;
  if (n % 2 == 0) {
    mpz_class half = n / 2;
    return (two ? half : mpz_class(0)) + legendre_valuation(half, p);
  }
  mpz_class half = (n - 1) / 2;
  return legendre_valuation(n, p) - (two ? half : mpz_class(0)) - legendre_valuation(half, p);
}

}  // namespace

mpz_class factorial_product_valuation(const model::FactorialProductLHS& lhs,
                                      const model::Assignment& assignment, std::uint64_t p) {
  if (!is_prime(p)) fail(ErrorKind::InvalidArgument, std::to_string(p) + " is not prime");
  mpz_class total = valuation(lhs.b, p);
  for (const auto& t : lhs.factorials) {
    const mpz_class& n = lookup(assignment, t.var);
    if (t.kind == model::FactorialKind::Double) {
      total += double_factorial_valuation(n, p);
    } else {
      if (!t.set.has_closed_form()) {
        fail(ErrorKind::InvalidArgument, "valuation needs a closed-form set, got " + t.set.to_string());
      }
      total += legendre_valuation(n, p);
      const std::uint64_t ap = t.set.closed_form_base();
      if (ap > 1) total += n * static_cast<unsigned long>(valuation(mpz_class(static_cast<unsigned long>(ap)), p));
    }
    if (t.base > 1) total += n * static_cast<unsigned long>(valuation(mpz_class(static_cast<unsigned long>(t.base)), p));
  }
  for (const auto& t : lhs.prime_powers) {
    const mpz_class& z = lookup(assignment, t.var);
    if (t.prime == p) total += z;
  }
  return total;
}

}  // namespace pfde::arith
