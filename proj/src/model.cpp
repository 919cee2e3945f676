#include "model.hpp"

#include <algorithm>

#include "arith.hpp"
#include "errors.hpp"

namespace pfde::model {

std::vector<std::string> FactorialProductLHS::variables() const {
  std::vector<std::string> vars;
  for (const auto& t : factorials) vars.push_back(t.var);
  for (const auto& t : prime_powers) vars.push_back(t.var);
  return vars;
}

mpz_class FactorialProductLHS::max_constant() const {
  mpz_class m = abs(b);
  auto bump = [&](std::uint64_t v) {
    mpz_class w = static_cast<unsigned long>(v);
    if (w > m) m = w;
  };
  for (const auto& t : factorials) {
    bump(t.base);
    if (t.kind == FactorialKind::Bhargava && t.set.has_closed_form()) bump(t.set.closed_form_base());
  }
  for (const auto& t : prime_powers) bump(t.prime);
  return m;
}

// ---------------------------------------------------------------------------
// UnivariatePoly

UnivariatePoly::UnivariatePoly(std::vector<mpq_class> leading_first) {
  auto first = std::find_if(leading_first.begin(), leading_first.end(),
                            [](const mpq_class& c) { return c != 0; });
  if (first == leading_first.end()) {
    coeffs_ = {mpq_class(0)};
  } else {
    coeffs_.assign(first, leading_first.end());
  }
}

UnivariatePoly UnivariatePoly::from_integers(const std::vector<mpz_class>& leading_first) {
  std::vector<mpq_class> q;
  for (const auto& c : leading_first) q.emplace_back(c);
  return UnivariatePoly(std::move(q));
}

bool UnivariatePoly::is_monomial() const {
  return std::count_if(coeffs_.begin(), coeffs_.end(),
                       [](const mpq_class& c) { return c != 0; }) <= 1;
}

bool UnivariatePoly::is_integral() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const mpq_class& c) { return c.get_den() == 1; });
}

mpz_class UnivariatePoly::denominator() const {
  mpz_class l = 1;
  for (const auto& c : coeffs_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  return l;
}

std::vector<mpz_class> UnivariatePoly::cleared() const {
  const mpz_class l = denominator();
  std::vector<mpz_class> out;
  for (const auto& c : coeffs_) {
    mpq_class scaled = c * l;
    out.push_back(scaled.get_num());
  }
  return out;
}

mpq_class UnivariatePoly::evaluate(const mpq_class& x) const {
  mpq_class acc = 0;
  for (const auto& c : coeffs_) acc = acc * x + c;
  return acc;
}

// ---------------------------------------------------------------------------
// BinaryForm

mpz_class BinaryForm::evaluate(const mpz_class& x, const mpz_class& y) const {
  // homogeneous Horner: sum a_i x^(d-i) y^i
  mpz_class acc = 0;
  mpz_class ypow = 1;
  for (const auto& c : coeffs) {
    acc = acc * x + c * ypow;
    ypow *= y;
  }
  return acc;
}

std::vector<mpz_class> BinaryForm::dehomogenized() const { return coeffs; }

// ---------------------------------------------------------------------------
// BivariatePoly

BivariatePoly::BivariatePoly(std::map<Key, mpz_class> terms) {
  for (auto& [k, c] : terms) {
    if (c != 0) terms_.emplace(k, std::move(c));
  }
}

bool BivariatePoly::uses_y() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.second > 0; });
}

bool BivariatePoly::uses_x() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.first > 0; });
}

unsigned BivariatePoly::total_degree() const {
  unsigned d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
  return d;
}

unsigned BivariatePoly::degree_in_x() const {
  unsigned d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, k.first);
  return d;
}

bool BivariatePoly::is_homogeneous() const {
  if (terms_.empty()) return false;
  const unsigned d = total_degree();
  return std::all_of(terms_.begin(), terms_.end(),
                     [d](const auto& t) { return t.first.first + t.first.second == d; });
}

mpz_class BivariatePoly::evaluate(const mpz_class& x, const mpz_class& y) const {
  mpz_class acc = 0;
  for (const auto& [k, c] : terms_) {
    mpz_class xp, yp;
    mpz_pow_ui(xp.get_mpz_t(), x.get_mpz_t(), k.first);
    mpz_pow_ui(yp.get_mpz_t(), y.get_mpz_t(), k.second);
    acc += c * xp * yp;
  }
  return acc;
}

std::vector<mpz_class> BivariatePoly::in_x_at(const mpz_class& y) const {
  const unsigned dx = degree_in_x();
  std::vector<mpz_class> out(dx + 1, 0);
  for (const auto& [k, c] : terms_) {
    mpz_class yp;
    mpz_pow_ui(yp.get_mpz_t(), y.get_mpz_t(), k.second);
    out[dx - k.first] += c * yp;
  }
  return out;
}

std::string BivariatePoly::to_string() const {
  if (terms_.empty()) return "0";
  // total degree descending, then x-degree descending
  std::vector<std::pair<Key, mpz_class>> ordered(terms_.begin(), terms_.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    const unsigned da = a.first.first + a.first.second;
    const unsigned db = b.first.first + b.first.second;
    if (da != db) return da > db;
    return a.first.first > b.first.first;
  });
  std::string out;
  bool first = true;
  for (const auto& [k, c] : ordered) {
    const bool negative = c < 0;
    const mpz_class mag = abs(c);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::vector<std::string> factors;
    const bool constant = k.first == 0 && k.second == 0;
    if (mag != 1 || constant) factors.push_back(mag.get_str());
    auto var = [&](const char* name, unsigned e) {
      if (e == 0) return;
      factors.push_back(e == 1 ? std::string(name) : std::string(name) + "^" + std::to_string(e));
    };
    var("x", k.first);
    var("y", k.second);
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) out += "*";
      out += factors[i];
    }
  }
  return out;
}

const char* rhs_kind_name(RhsKind kind) {
  switch (kind) {
    case RhsKind::Univariate: return "univariate";
    case RhsKind::BinaryForm: return "binary_form";
    case RhsKind::Bivariate: return "bivariate";
  }
  return "?";
}

UnivariatePoly Rhs::univariate() const {
  if (poly.uses_y()) fail(ErrorKind::InvalidArgument, "right-hand side depends on y");
  return UnivariatePoly::from_integers(poly.in_x_at(0));
}

BinaryForm Rhs::form() const {
  if (!poly.is_homogeneous()) fail(ErrorKind::InvalidArgument, "right-hand side is not homogeneous");
  const unsigned d = poly.total_degree();
  BinaryForm f;
  f.coeffs.assign(d + 1, 0);
  for (const auto& [k, c] : poly.terms()) f.coeffs[d - k.first] = c;
  return f;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Factorials above this argument are refused; 10^7! already has ~65M digits.
constexpr unsigned long kMaxFactorialArgument = 10'000'000;

unsigned long lookup_small(const Assignment& a, const std::string& var) {
  auto it = a.find(var);
  if (it == a.end()) fail(ErrorKind::Unbound, "variable '" + var + "' is unbound");
  if (it->second < 0) fail(ErrorKind::InvalidArgument, "variable '" + var + "' must be >= 0");
  if (it->second > kMaxFactorialArgument) {
    fail(ErrorKind::ResourceLimit, "variable '" + var + "' too large to expand exactly");
  }
  return it->second.get_ui();
}

}  // namespace

mpz_class eval_lhs_product(const FactorialProductLHS& lhs, const Assignment& a) {
  mpz_class value = 1;
  for (const auto& t : lhs.factorials) {
    const unsigned long n = lookup_small(a, t.var);
    value *= t.kind == FactorialKind::Double ? bhargava::double_factorial(n)
                                             : bhargava::bhargava_factorial(t.set, n);
    if (t.base > 1) {
      mpz_class pw;
      mpz_ui_pow_ui(pw.get_mpz_t(), t.base, n);
      value *= pw;
    }
  }
  for (const auto& t : lhs.prime_powers) {
    const unsigned long z = lookup_small(a, t.var);
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), t.prime, z);
    value *= pw;
  }
  return value;
}

mpz_class eval_lhs(const FactorialProductLHS& lhs, const Assignment& a) {
  return lhs.b * eval_lhs_product(lhs, a);
}

mpq_class eval_rhs(const Rhs& rhs, const mpz_class& x, const std::optional<mpz_class>& y) {
  if (rhs.poly.uses_y() && !y) fail(ErrorKind::InvalidArgument, "arity mismatch: rhs needs y");
  if (!rhs.poly.uses_y() && y && rhs.kind == RhsKind::Univariate) {
    fail(ErrorKind::InvalidArgument, "arity mismatch: univariate rhs takes only x");
  }
  return mpq_class(rhs.poly.evaluate(x, y.value_or(0)));
}

// ---------------------------------------------------------------------------
// Integer polynomial helpers

mpz_class horner(const std::vector<mpz_class>& p, const mpz_class& x) {
  mpz_class acc = 0;
  for (const auto& c : p) acc = acc * x + c;
  return acc;
}

std::vector<mpz_class> derivative(const std::vector<mpz_class>& p) {
  if (p.size() <= 1) return {mpz_class(0)};
  const std::size_t d = p.size() - 1;
  std::vector<mpz_class> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(p[i] * static_cast<unsigned long>(d - i));
  return out;
}

bool DepressedForm::pure_power() const {
  return std::all_of(q.begin() + 1, q.end(), [](const mpz_class& c) { return c == 0; });
}

DepressedForm depress_polynomial(const UnivariatePoly& f, const mpz_class& b) {
  const std::size_t d = f.degree();
  if (f.is_zero() || d < 2) fail(ErrorKind::InvalidArgument, "depress_polynomial needs degree >= 2");
  const mpz_class l = f.denominator();
  const std::vector<mpz_class> a = f.cleared();  // a[0] leading
  const mpz_class& a0 = a[0];
  const unsigned long dd = d;

  // y = d*a0*x turns d^d a0^(d-1) f into monic P(y) = sum b_i y^(d-i)
  std::vector<mpz_class> p(d + 1);
  p[0] = 1;
  mpz_class dpow = 1, a0pow = 1;  // d^i, a0^(i-1)
  for (std::size_t i = 1; i <= d; ++i) {
    dpow *= dd;
    if (i >= 2) a0pow *= a0;
    p[i] = dpow * a[i] * a0pow;
  }

  // Q(z) = P(z - a1) by nested multiplication with (z - a1)
  const mpz_class h = -a[1];
  std::vector<mpz_class> q{p[0]};
  for (std::size_t i = 1; i <= d; ++i) {
    std::vector<mpz_class> next(q.size() + 1, 0);
    for (std::size_t j = 0; j < q.size(); ++j) {
      next[j] += q[j];
      next[j + 1] += q[j] * h;
    }
    next.back() += p[i];
    q = std::move(next);
  }

  DepressedForm out;
  out.q = std::move(q);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), dd, dd);
  mpz_class a0d;
  mpz_pow_ui(a0d.get_mpz_t(), a0.get_mpz_t(), dd - 1);
  out.rhs_scale = l * scale * a0d;
  out.c = b * out.rhs_scale;
  out.z_of_x = AffineMap{mpz_class(dd) * a0, a[1]};
  if (out.q[1] != 0) fail(ErrorKind::Internal, "depression left a z^(d-1) term");
  return out;
}

}  // namespace pfde::model
