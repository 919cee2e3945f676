#include <doctest.h>

#include <random>

#include "arith.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "valuation.hpp"

using namespace pfde;
using namespace pfde::model;

TEST_CASE("parse a factorial product equation") {
  const auto eq = parse_equation("1 * n! * m!*AP(2,0) * 7^z = x^2 - 1");
  CHECK(eq.lhs.b == 1);
  REQUIRE(eq.lhs.factorials.size() == 2);
  CHECK(eq.lhs.factorials[1].set == bhargava::SetSpec::progression(2, 0));
  REQUIRE(eq.lhs.prime_powers.size() == 1);
  CHECK(eq.lhs.prime_powers[0].prime == 7);
  CHECK(eq.lhs.variables() == std::vector<std::string>{"n", "m", "z"});
  CHECK(eq.rhs.kind == RhsKind::Univariate);
  CHECK(eq.lhs.max_constant() == 7);
}

TEST_CASE("bases attach to factorial variables") {
  const auto eq = parse_equation("2 * n! * 3^n = x^3");
  REQUIRE(eq.lhs.factorials.size() == 1);
  CHECK(eq.lhs.factorials[0].base == 3);
  CHECK(eq.lhs.prime_powers.empty());
  Assignment a{{"n", 4}};
  CHECK(eval_lhs(eq.lhs, a) == 2 * 24 * 81);
}

TEST_CASE("printing round trips through the parser") {
  for (const char* text :
       {"1 * n! = x^2 - 1", "-3 * n! * m!*AP(2,1) = x^3 + y^3 ; coprime",
        "1 * n!! = x^2 - 1", "1 * n! * m! = x^2*y + x*y^2 ; coprime ; form",
        "5 * 2^k * n!*{0,1,4,9,16} = x^4 - x^2*y^2 + 7*y", "1 * 3^m * m! * n! = x^4*y^2 + x^2*y^4"}) {
    const auto eq = parse_equation(text);
    const auto again = parse_equation(print_equation(eq));
    CHECK(again == eq);
  }
}

TEST_CASE("rational right-hand sides scale b") {
  const auto eq = parse_equation("1 * n! = x^2/2 + x/3");
  CHECK(eq.lhs.b == 6);
  CHECK(eq.rhs.poly.evaluate(1, 0) == 5);
}

TEST_CASE("right-hand side classification") {
  CHECK(parse_equation("1 * n! = x^5").rhs.kind == RhsKind::Univariate);
  CHECK(parse_equation("1 * n! = x^2 + y^2").rhs.kind == RhsKind::BinaryForm);
  CHECK(parse_equation("1 * n! = x^2 + y").rhs.kind == RhsKind::Bivariate);
  CHECK(parse_equation("1 * n! = (x*y)^4*(x-y)^3").rhs.kind == RhsKind::BinaryForm);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_equation("1 * n! = x^2 +");
    FAIL("expected syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 14);
  }
  CHECK_THROWS_AS(parse_equation("1 * n! x^2"), SyntaxError);
  CHECK_THROWS_AS(parse_equation("1 * n! = 7"), SyntaxError);
  CHECK_THROWS_AS(parse_equation("1 * n! = x^2 ; bogus"), SyntaxError);
}

TEST_CASE("semantic errors") {
  auto kind_of = [](const char* text) {
    try {
      parse_equation(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Internal;
  };
  CHECK(kind_of("1 * 4^z = x^2") == ErrorKind::Semantic);
  CHECK(kind_of("1 * n! * n! = x^2") == ErrorKind::Semantic);
  CHECK(kind_of("1 * x! = x^2") == ErrorKind::Semantic);
  CHECK(kind_of("0 * n! = x^2") == ErrorKind::Semantic);
  CHECK(kind_of("1 * n! = x^2 + y ; form") == ErrorKind::Semantic);
}

TEST_CASE("evaluation needs every variable") {
  const auto eq = parse_equation("1 * n! * m! = x^2");
  CHECK_THROWS_AS(eval_lhs(eq.lhs, Assignment{{"n", 3}}), Error);
  CHECK(eval_lhs(eq.lhs, Assignment{{"n", 3}, {"m", 4}}) == 144);
  CHECK(eval_rhs(eq.rhs, 12) == 144);
}

TEST_CASE("depression transform preserves solutions") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t deg = 2 + rng() % 4;
    std::vector<mpq_class> coeffs;
    for (std::size_t i = 0; i <= deg; ++i) {
      long num = static_cast<long>(rng() % 11) - 5;
      if (i == 0 && num == 0) num = 3;
      coeffs.emplace_back(num, static_cast<long>(1 + rng() % 3));
      coeffs.back().canonicalize();
    }
    const UnivariatePoly f(coeffs);
    const mpz_class b = static_cast<long>(rng() % 7) - 3 == 0 ? 1 : static_cast<long>(rng() % 5) + 1;
    const auto dep = depress_polynomial(f, b);
    CHECK(dep.q[0] == 1);
    CHECK(dep.q[1] == 0);
    for (long x = -6; x <= 6; ++x) {
      const mpz_class z = dep.z_of_x.apply(x);
      const mpq_class lhs(horner(dep.q, z));
      CHECK(lhs == mpq_class(dep.rhs_scale) * f.evaluate(x));
    }
  }
}

TEST_CASE("depressing a pure power") {
  const auto dep = depress_polynomial(UnivariatePoly::from_integers({1, 2, 1}), 1);
  CHECK(dep.pure_power());
  const auto brocard = depress_polynomial(UnivariatePoly::from_integers({1, 0, -1}), 1);
  CHECK_FALSE(brocard.pure_power());
  CHECK(brocard.c == 4);
}

TEST_CASE("valuation without expansion matches the expanded product") {
  std::mt19937_64 rng(29);
  const auto eq = parse_equation("12 * n! * m!*AP(6,1) * k!! * 5^z * 2^w = x^2");
  for (int trial = 0; trial < 200; ++trial) {
    Assignment a{{"n", static_cast<long>(rng() % 40)},
                 {"m", static_cast<long>(rng() % 30)},
                 {"k", static_cast<long>(rng() % 35)},
                 {"z", static_cast<long>(rng() % 6)},
                 {"w", static_cast<long>(rng() % 6)}};
    const mpz_class value = eval_lhs(eq.lhs, a);
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 37ULL}) {
      CHECK(arith::factorial_product_valuation(eq.lhs, a, p) == arith::valuation(value, p));
    }
  }
}

TEST_CASE("valuation of astronomically large arguments") {
  const auto eq = parse_equation("1 * n! = x^2");
  Assignment a{{"n", mpz_class("100000000000000000000")}};
  CHECK(arith::factorial_product_valuation(eq.lhs, a, 5) ==
        arith::legendre_valuation(mpz_class("100000000000000000000"), 5));
}

TEST_CASE("canonical polynomial text") {
  const auto eq = parse_equation("1 * n! = y^2*x + x^2*y - 3*y + 1");
  CHECK(eq.rhs.poly.to_string() == "x^2*y + x*y^2 - 3*y + 1");
}
