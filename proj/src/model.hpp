#pragma once

// Equation data model: the factorial-product left-hand side, polynomial
// right-hand sides, the text DSL, exact evaluation and the depression
// transform for univariate right-hand sides.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bhargava.hpp"

namespace pfde::model {

using Assignment = std::map<std::string, mpz_class>;

enum class FactorialKind { Bhargava, Double };

/// n!_S * A^n (or n!! when kind == Double; the set is then ignored).
struct FactorialTerm {
  std::string var;
  FactorialKind kind = FactorialKind::Bhargava;
  bhargava::SetSpec set = bhargava::SetSpec::integers();
  std::uint64_t base = 1;
  bool operator==(const FactorialTerm&) const = default;
};

struct PrimePowerTerm {
  std::uint64_t prime = 2;
  std::string var;
  bool operator==(const PrimePowerTerm&) const = default;
};

struct FactorialProductLHS {
  mpz_class b = 1;
  std::vector<FactorialTerm> factorials;
  std::vector<PrimePowerTerm> prime_powers;

  // Factorial variables first, then prime exponents, in declaration order.
  // This is also the canonical enumeration order of search tuples.
  std::vector<std::string> variables() const;
  // max{|b|, A_i, AP moduli, p_j}
  mpz_class max_constant() const;
  bool operator==(const FactorialProductLHS&) const = default;
};

/// Polynomial in one variable, coefficients leading first (coeffs[0] is the
/// coefficient of x^d). The leading coefficient is nonzero unless the
/// polynomial is the constant zero.
class UnivariatePoly {
 public:
  UnivariatePoly() = default;
  explicit UnivariatePoly(std::vector<mpq_class> leading_first);
  static UnivariatePoly from_integers(const std::vector<mpz_class>& leading_first);

  std::size_t degree() const { return coeffs_.size() - 1; }
  const std::vector<mpq_class>& coefficients() const { return coeffs_; }
  const mpq_class& leading() const { return coeffs_.front(); }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0; }
  bool is_monomial() const;
  bool is_integral() const;
  // lcm of the denominators
  mpz_class denominator() const;
  // coefficients scaled by denominator(), leading first
  std::vector<mpz_class> cleared() const;

  mpq_class evaluate(const mpq_class& x) const;

 private:
  std::vector<mpq_class> coeffs_{mpq_class(0)};
};

/// Homogeneous f(x,y) = sum coeffs[i] x^(d-i) y^i; coeffs[0] is a_d.
struct BinaryForm {
  std::vector<mpz_class> coeffs;

  std::size_t degree() const { return coeffs.size() - 1; }
  const mpz_class& leading_x() const { return coeffs.front(); }  // a_d
  const mpz_class& leading_y() const { return coeffs.back(); }   // a_0
  mpz_class evaluate(const mpz_class& x, const mpz_class& y) const;
  // f(x,1), leading first (may have vanishing leading terms)
  std::vector<mpz_class> dehomogenized() const;
};

/// Integer polynomial in x and y keyed by (deg_x, deg_y).
class BivariatePoly {
 public:
  using Key = std::pair<unsigned, unsigned>;

  BivariatePoly() = default;
  explicit BivariatePoly(std::map<Key, mpz_class> terms);

  const std::map<Key, mpz_class>& terms() const { return terms_; }
  bool uses_y() const;
  bool uses_x() const;
  unsigned total_degree() const;
  unsigned degree_in_x() const;
  bool is_homogeneous() const;
  mpz_class evaluate(const mpz_class& x, const mpz_class& y) const;
  // coefficients in x (leading first) after fixing y
  std::vector<mpz_class> in_x_at(const mpz_class& y) const;
  std::string to_string() const;
  bool operator==(const BivariatePoly&) const = default;

 private:
  std::map<Key, mpz_class> terms_;  // no zero coefficients stored
};

enum class RhsKind { Univariate, BinaryForm, Bivariate };

const char* rhs_kind_name(RhsKind kind);

struct Rhs {
  RhsKind kind = RhsKind::Univariate;
  BivariatePoly poly;  // integral; the other views derive from it

  UnivariatePoly univariate() const;
  BinaryForm form() const;
  bool operator==(const Rhs&) const = default;
};

struct Constraints {
  bool coprime = false;        // restrict to gcd(x,y) = 1
  bool form_declared = false;  // `; form` clause present
  bool operator==(const Constraints&) const = default;
};

struct Equation {
  FactorialProductLHS lhs;
  Rhs rhs;
  Constraints constraints;
  bool operator==(const Equation&) const = default;
};

/// Grammar (whitespace-insensitive):
///   equation := lhs '=' poly (';' ('coprime' | 'form'))*
///   lhs      := [int] ('*' term)*        the leading int is b, default 1
///   term     := var '!' ['!'] ['*' set]  |  int '^' var
///   set      := 'Z' | 'AP(' int ',' int ')' | '{' int (',' int)* '}'
///   poly     := sum of products of integers, rationals, x, y, (poly), '^' int
/// `A^v` attaches base A to the factorial variable v when one exists,
/// otherwise it declares a prime-power term p^v (p must be prime). Rational
/// right-hand sides are cleared to integers by scaling b.
Equation parse_equation(std::string_view text);
std::string print_equation(const Equation& eq);
std::string print_lhs(const FactorialProductLHS& lhs);

nlohmann::json equation_to_json(const Equation& eq);

/// Exact value b * prod n_i!_{S_i} A_i^{n_i} * prod p_j^{z_j}.
mpz_class eval_lhs(const FactorialProductLHS& lhs, const Assignment& a);
/// Same product without b.
mpz_class eval_lhs_product(const FactorialProductLHS& lhs, const Assignment& a);

mpq_class eval_rhs(const Rhs& rhs, const mpz_class& x,
                   const std::optional<mpz_class>& y = std::nullopt);

/// z = scale * x + shift
struct AffineMap {
  mpz_class scale = 1;
  mpz_class shift = 0;
  mpz_class apply(const mpz_class& x) const { return scale * x + shift; }
};

/// Q(z) = z^d + c_2 z^(d-2) + ... + c_d with z = d*a0*x + a1 (integer
/// coefficients of f after clearing). For every integer x,
/// b*M = f(x)  <=>  Q(z) = c*M, where c = b * L * d^d * a0^(d-1) and L is the
/// denominator cleared from f.
struct DepressedForm {
  std::vector<mpz_class> q;  // leading first, q[0] == 1, q[1] == 0
  mpz_class c;
  mpz_class rhs_scale;       // Q(z) = rhs_scale * f(x)
  AffineMap z_of_x;
  std::size_t degree() const { return q.size() - 1; }
  // true when Q(z) = z^d, i.e. f has a single distinct root
  bool pure_power() const;
};

DepressedForm depress_polynomial(const UnivariatePoly& f, const mpz_class& b);

// Integer polynomial helpers (leading first).
mpz_class horner(const std::vector<mpz_class>& p, const mpz_class& x);
std::vector<mpz_class> derivative(const std::vector<mpz_class>& p);

}  // namespace pfde::model
