#include <algorithm>
#include <map>

#include "arith.hpp"
#include "errors.hpp"
#include "search_internal.hpp"

namespace pfde::solver {

namespace {

using Exponents = std::map<mpz_class, mpz_class>;  // prime -> exponent

void add_factored(Exponents& e, const mpz_class& value, const mpz_class& times) {
  if (times == 0) return;
  for (const auto& pp : arith::factorize(value).factors) e[pp.prime] += times * pp.exponent;
}

void drop_zeros(Exponents& e) {
  for (auto it = e.begin(); it != e.end();) it = it->second == 0 ? e.erase(it) : std::next(it);
}

mpz_class pow_z(const mpz_class& base, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// sign * coeff * prod base^exp * m! / divisor
struct ClosedForm {
  int sign = 1;
  std::vector<std::pair<mpz_class, mpz_class>> powers;
  mpz_class m = 0;
  mpz_class divisor = 1;

  std::string text() const {
    std::string out = sign < 0 ? "-" : "";
    bool first = true;
    for (const auto& [base, exp] : powers) {
      if (base == 1 || exp == 0) continue;
      if (!first) out += " * ";
      out += base.get_str();
      if (exp != 1) out += "^" + exp.get_str();
      first = false;
    }
    if (!first) out += " * ";
    out += m.get_str() + "!";
    if (divisor != 1) out += " / " + divisor.get_str();
    return out;
  }

  // Exponents of |value| / m!, with the divisor taken off.
  Exponents exponents() const {
    Exponents e;
    for (const auto& [base, exp] : powers) add_factored(e, base, exp);
    for (const auto& pp : arith::factorize(divisor).factors) e[pp.prime] -= pp.exponent;
    drop_zeros(e);
    return e;
  }

  mpz_class expand() const {
    mpz_class v = arith::factorial(m.get_ui());
    for (const auto& [base, exp] : powers) v *= pow_z(base, exp.get_ui());
    if (v % divisor != 0) fail(ErrorKind::Internal, "closed form is not an integer");
    return sign * (v / divisor);
  }
};

model::FactorialProductLHS family_lhs(const mpz_class& b, const std::vector<std::uint64_t>& bases) {
  model::FactorialProductLHS lhs;
  lhs.b = b;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    model::FactorialTerm t;
    t.var = "n" + std::to_string(i + 1);
    t.base = bases[i];
    lhs.factorials.push_back(t);
  }
  return lhs;
}

// Writes the left-hand side as sign * (m!)^d * prod p^e. Every factorial
// argument must be m, m+1 or small enough to expand.
bool lhs_exponents(const model::FactorialProductLHS& lhs, const model::Assignment& a, const mpz_class& m,
                   unsigned long d, int& sign, Exponents& e) {
  sign = sgn(lhs.b);
  add_factored(e, abs(lhs.b), 1);
  unsigned long copies = 0;
  for (const auto& f : lhs.factorials) {
    const mpz_class n = a.at(f.var);
    if (n == m || n == m + 1) {
      ++copies;
      if (n == m + 1) add_factored(e, m + 1, 1);
    } else if (n <= kExpandLimit) {
      add_factored(e, arith::factorial(n.get_ui()), 1);
    } else {
      return false;
    }
    if (f.base > 1) add_factored(e, mpz_class(std::to_string(f.base)), n);
  }
  drop_zeros(e);
  return copies == d;
}

// Checks b * prod n_i! A_i^n_i = x^d for x given in closed form, without
// expanding either side.
bool symbolic_power_check(const model::FactorialProductLHS& lhs, const model::Assignment& a,
                          const ClosedForm& x, unsigned long d) {
  int sign = 1;
  Exponents left;
  if (!lhs_exponents(lhs, a, x.m, d, sign, left)) return false;
  Exponents right;
  for (const auto& [p, e] : x.exponents()) {
    if (e < 0) return false;
    right[p] = e * d;
  }
  const int right_sign = (x.sign < 0 && d % 2 == 1) ? -1 : 1;
  return sign == right_sign && left == right;
}

struct FamilyPieces {
  mpz_class pi;      // A_1 ... A_d
  mpz_class r;       // R
  mpz_class s;
  mpz_class m;
  ClosedForm x;
  model::Assignment assignment;
};

FamilyPieces family_pieces(const mpz_class& b, const std::vector<std::uint64_t>& bases, unsigned long d,
                           unsigned long t) {
  if (d < 2) fail(ErrorKind::Hypothesis, "d must be >= 2");
  if (t < 1) fail(ErrorKind::Hypothesis, "t must be >= 1");
  if (bases.size() < d) fail(ErrorKind::Hypothesis, "need d <= r (d factorials available)");
  if (b == 0) fail(ErrorKind::Hypothesis, "b must be nonzero");
  for (auto A : bases) {
    if (A < 1) fail(ErrorKind::Hypothesis, "bases must be >= 1");
  }
  if (b < 0 && (d % 2 == 0 || t % 2 == 0)) {
    fail(ErrorKind::Hypothesis, "negative b needs odd d and odd t");
  }
  FamilyPieces out;
  out.pi = 1;
  for (unsigned long i = 0; i < d; ++i) out.pi *= mpz_class(std::to_string(bases[i]));
  mpz_class rest = 1;
  for (std::size_t i = d; i < bases.size(); ++i) rest *= mpz_class(std::to_string(bases[i]));
  const mpz_class ad(std::to_string(bases[d - 1]));
  out.r = abs(b) * pow_z(out.pi, d - 1) * ad * rest;
  const mpz_class rd = out.r * d;
  if (t * d - 1 > 4096 || mpz_sizeinbase(rd.get_mpz_t(), 2) * (t * d - 1) > (1u << 22)) {
    fail(ErrorKind::ResourceLimit, "family parameter s would be too large to write down");
  }
  out.s = pow_z(rd, t * d - 1) - 1;
  out.m = d * (out.s + 1) - 1;
  out.x.sign = sgn(b);
  out.x.powers = {{out.pi, out.s}, {rd, mpz_class(t)}};
  out.x.m = out.m;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const std::string var = "n" + std::to_string(i + 1);
    if (i + 1 < d) {
      out.assignment[var] = out.m;
    } else if (i + 1 == d) {
      out.assignment[var] = out.m + 1;
    } else {
      out.assignment[var] = 1;
    }
  }
  return out;
}

}  // namespace

SolutionRecord construct_power_family(const FamilyParams& params) {
  const auto pieces = family_pieces(params.b, params.bases, params.d, params.t);
  const auto lhs = family_lhs(params.b, params.bases);
  const auto eq = detail::equation_with_rhs(
      lhs, model::BivariatePoly({{{static_cast<unsigned>(params.d), 0u}, 1}}), false);

  SolutionRecord rec;
  rec.equation = model::print_equation(eq);
  rec.assignment = pieces.assignment;
  ConstructionCertificate cert;
  cert.route = "power_family";
  cert.t = params.t;
  cert.r = pieces.r;
  cert.s = pieces.s;
  cert.m = pieces.m;
  rec.verified = symbolic_power_check(lhs, pieces.assignment, pieces.x, params.d);
  if (pieces.m <= kExpandLimit) {
    const mpz_class x = pieces.x.expand();
    rec.assignment["x"] = x;
    const bool direct = model::eval_lhs(lhs, pieces.assignment) == pow_z(x, params.d);
    rec.verified = rec.verified && direct;
    cert.expanded_check = true;
  } else {
    rec.symbolic["x"] = pieces.x.text();
  }
  rec.certificate = cert;
  return rec;
}

namespace {

struct Direction {
  std::string route;
  mpz_class ratio;  // x = ratio*y, y = ratio*x, or 1 on the diagonal
  mpz_class c;      // f evaluated along the direction
};

// Searching s up to this bound is enough for any form seen in practice; a
// larger s is reported as a hypothesis failure rather than looped on.
constexpr unsigned long kMaxRatio = 1u << 16;

Direction pick_direction(const model::BinaryForm& f, Proportion p, const std::optional<mpz_class>& ratio) {
  auto along_x = [&](const mpz_class& s) { return f.evaluate(s, 1); };  // x = s*y
  auto along_y = [&](const mpz_class& s) { return f.evaluate(1, s); };  // y = s*x
  auto first_positive = [&](auto eval) -> std::optional<mpz_class> {
    if (ratio) return eval(*ratio) > 0 ? std::optional(*ratio) : std::nullopt;
    for (unsigned long s = 1; s <= kMaxRatio; ++s) {
      if (eval(mpz_class(s)) > 0) return mpz_class(s);
    }
    return std::nullopt;
  };
  if (p == Proportion::Diagonal || (p == Proportion::Auto && f.evaluate(1, 1) > 0)) {
    if (f.evaluate(1, 1) <= 0) fail(ErrorKind::Hypothesis, "f(1,1) must be positive on the diagonal");
    return {"diagonal", 1, f.evaluate(1, 1)};
  }
  if (p == Proportion::XisSY || (p == Proportion::Auto && f.leading_x() > 0)) {
    if (auto s = first_positive(along_x)) return {"x=sy", *s, along_x(*s)};
    fail(ErrorKind::Hypothesis, "no s with f(s,1) > 0");
  }
  if (p == Proportion::YisSX || (p == Proportion::Auto && f.leading_y() > 0)) {
    if (auto s = first_positive(along_y)) return {"y=sx", *s, along_y(*s)};
    fail(ErrorKind::Hypothesis, "no s with f(1,s) > 0");
  }
  fail(ErrorKind::Hypothesis, "the form takes no positive value along x = sy or y = sx");
}

model::BivariatePoly form_poly(const model::BinaryForm& f) {
  std::map<model::BivariatePoly::Key, mpz_class> terms;
  const auto d = static_cast<unsigned>(f.degree());
  for (unsigned i = 0; i <= d; ++i) {
    if (f.coeffs[i] != 0) terms[{d - i, i}] = f.coeffs[i];
  }
  return model::BivariatePoly(terms);
}

}  // namespace

SolutionRecord construct_form_family(const FormFamilyParams& params) {
  const auto& f = params.form;
  if (f.coeffs.size() < 3) fail(ErrorKind::Hypothesis, "form degree must be >= 2");
  if (params.b <= 0) fail(ErrorKind::Hypothesis, "b must be positive");
  const unsigned long d = f.degree();
  if (params.bases.size() < d) fail(ErrorKind::Hypothesis, "need deg f <= r");
  if (params.ratio && *params.ratio < 1) fail(ErrorKind::Hypothesis, "ratio must be >= 1");

  const Direction dir = pick_direction(f, params.proportion, params.ratio);
  // b*LHS = C*y^d  <=>  b*C^(d-1)*LHS = (C*y)^d
  const mpz_class b2 = params.b * pow_z(dir.c, d - 1);
  const auto pieces = family_pieces(b2, params.bases, d, params.t);
  ClosedForm lead = pieces.x;  // the coordinate that is not scaled by the ratio
  lead.divisor = dir.c;
  ClosedForm other = lead;
  other.powers.emplace_back(dir.ratio, 1);

  const auto lhs = family_lhs(params.b, params.bases);
  const auto eq = detail::equation_with_rhs(lhs, form_poly(f), false);
  SolutionRecord rec;
  rec.equation = model::print_equation(eq);
  rec.assignment = pieces.assignment;

  const bool x_scaled = dir.route == "x=sy";
  const ClosedForm& xf = x_scaled ? other : lead;
  const ClosedForm& yf = x_scaled ? lead : other;

  // C*y = X: the divisor must cancel, and X must satisfy the power identity
  bool ok = dir.c == (dir.route == "y=sx" ? f.evaluate(1, dir.ratio) : f.evaluate(dir.ratio, 1));
  for (const auto& [p, e] : lead.exponents()) ok = ok && e >= 0;
  ok = ok && symbolic_power_check(family_lhs(b2, params.bases), pieces.assignment, pieces.x, d);

  ConstructionCertificate cert;
  cert.route = dir.route;
  cert.t = params.t;
  cert.r = pieces.r;
  cert.s = pieces.s;
  cert.m = pieces.m;
  cert.proportion = dir.ratio;
  cert.coefficient = dir.c;
  if (pieces.m <= kExpandLimit) {
    const mpz_class x = xf.expand(), y = yf.expand();
    rec.assignment["x"] = x;
    rec.assignment["y"] = y;
    ok = ok && model::eval_lhs(lhs, pieces.assignment) == f.evaluate(x, y);
    cert.expanded_check = true;
  } else {
    rec.symbolic["x"] = xf.text();
    rec.symbolic["y"] = yf.text();
  }
  rec.verified = ok;
  rec.certificate = cert;
  return rec;
}

}  // namespace pfde::solver
