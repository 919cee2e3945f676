// Parser and printer for the equation DSL.

#include <algorithm>
#include <cctype>
#include <set>

#include "arith.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace pfde::model {

namespace {

using RatPoly = std::map<BivariatePoly::Key, mpq_class>;

constexpr unsigned long kMaxExponent = 256;

RatPoly add(RatPoly a, const RatPoly& b, int sign = 1) {
  for (const auto& [k, c] : b) {
    a[k] += sign > 0 ? c : mpq_class(-c);
    if (a[k] == 0) a.erase(k);
  }
  return a;
}

RatPoly mul(const RatPoly& a, const RatPoly& b) {
  RatPoly out;
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) {
      BivariatePoly::Key k{ka.first + kb.first, ka.second + kb.second};
      out[k] += ca * cb;
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    it = it->second == 0 ? out.erase(it) : std::next(it);
  }
  return out;
}

RatPoly constant(const mpq_class& c) {
  RatPoly p;
  if (c != 0) p[{0, 0}] = c;
  return p;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Equation parse() {
    Equation eq;
    parse_lhs(eq.lhs);
    expect('=');
    const std::size_t rhs_pos = pos_;
    RatPoly rhs = parse_expr();
    while (peek() == ';') {
      ++pos_;
      const std::size_t at = pos_;
      std::string word = ident();
      if (word == "coprime") {
        eq.constraints.coprime = true;
      } else if (word == "form") {
        eq.constraints.form_declared = true;
      } else {
        throw SyntaxError(at, "unknown clause '" + word + "'");
      }
    }
    if (peek() != '\0') throw SyntaxError(pos_, "unexpected character '" + std::string(1, s_[pos_]) + "'");
    finish(eq, std::move(rhs), rhs_pos);
    return eq;
  }

 private:
  struct PowerTerm {
    std::uint64_t base;
    std::string var;
    std::size_t pos;
  };

  char peek() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) throw SyntaxError(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  mpz_class integer() {
    peek();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw SyntaxError(pos_, "expected an integer");
    return mpz_class(std::string(s_.substr(start, pos_ - start)));
  }

  std::string ident() {
    peek();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) throw SyntaxError(pos_, "expected an identifier");
    return std::string(s_.substr(start, pos_ - start));
  }

  bool at_set_spec() {
    const std::size_t save = pos_;
    bool result = false;
    if (peek() == '*') {
      ++pos_;
      const char c = peek();
      result = c == 'Z' || c == '{' || s_.substr(pos_).starts_with("AP(");
    }
    pos_ = save;
    return result;
  }

  bhargava::SetSpec set_spec() {
    expect('*');
    peek();
    const std::size_t start = pos_;
    if (s_[pos_] == 'Z') {
      ++pos_;
    } else {
      const char close = s_[pos_] == '{' ? '}' : ')';
      const std::size_t end = s_.find(close, pos_);
      if (end == std::string_view::npos) throw SyntaxError(pos_, std::string("missing '") + close + "'");
      pos_ = end + 1;
    }
    try {
      return bhargava::SetSpec::parse(s_.substr(start, pos_ - start));
    } catch (const Error& e) {
      throw SyntaxError(start, e.what());
    }
  }

  void parse_term(FactorialProductLHS& lhs, std::vector<PowerTerm>& powers) {
    const char c = peek();
    const std::size_t at = pos_;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpz_class base = integer();
      expect('^');
      std::string var = ident();
      if (base < 1 || !base.fits_ulong_p()) throw SyntaxError(at, "power base must be a positive integer");
      powers.push_back({base.get_ui(), var, at});
      return;
    }
    if (!std::islower(static_cast<unsigned char>(c))) throw SyntaxError(pos_, "expected a term");
    FactorialTerm t;
    t.var = ident();
    if (t.var == "x" || t.var == "y") throw Error(ErrorKind::Semantic, "'" + t.var + "' is reserved for the right-hand side");
    expect('!');
    if (pos_ < s_.size() && s_[pos_] == '!') {
      ++pos_;
      t.kind = FactorialKind::Double;
    }
    if (at_set_spec()) {
      if (t.kind == FactorialKind::Double) throw SyntaxError(pos_, "double factorials take no set");
      t.set = set_spec();
    }
    lhs.factorials.push_back(std::move(t));
  }

  void parse_lhs(FactorialProductLHS& lhs) {
    std::vector<PowerTerm> powers;
    const char c = peek();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t save = pos_;
      bool negative = false;
      if (c == '-') {
        negative = true;
        ++pos_;
      }
      mpz_class value = integer();
      if (!negative && peek() == '^') {
        pos_ = save;  // it is a power term, not b
        parse_term(lhs, powers);
      } else {
        if (value == 0) throw Error(ErrorKind::Semantic, "b must be nonzero");
        lhs.b = negative ? mpz_class(-value) : value;
      }
    } else {
      parse_term(lhs, powers);
    }
    while (peek() == '*') {
      ++pos_;
      parse_term(lhs, powers);
    }
    resolve(lhs, powers);
  }

  static void resolve(FactorialProductLHS& lhs, const std::vector<PowerTerm>& powers) {
    std::set<std::string> seen;
    for (const auto& t : lhs.factorials) {
      if (!seen.insert(t.var).second) throw Error(ErrorKind::Semantic, "duplicate variable '" + t.var + "'");
    }
    std::set<std::uint64_t> primes;
    for (const auto& p : powers) {
      auto it = std::find_if(lhs.factorials.begin(), lhs.factorials.end(),
                             [&](const FactorialTerm& t) { return t.var == p.var; });
      if (it != lhs.factorials.end()) {
        if (it->base != 1) throw Error(ErrorKind::Semantic, "second base for '" + p.var + "'");
        it->base = p.base;
        continue;
      }
      if (p.var == "x" || p.var == "y") throw Error(ErrorKind::Semantic, "'" + p.var + "' is reserved for the right-hand side");
      if (!arith::is_prime(p.base)) {
        throw Error(ErrorKind::Semantic, "exponent variable '" + p.var + "' needs a prime base, got " +
                                             std::to_string(p.base));
      }
      if (!seen.insert(p.var).second) throw Error(ErrorKind::Semantic, "duplicate variable '" + p.var + "'");
      if (!primes.insert(p.base).second) throw Error(ErrorKind::Semantic, "duplicate prime " + std::to_string(p.base));
      lhs.prime_powers.push_back({p.base, p.var});
    }
  }

  RatPoly parse_expr() {
    RatPoly acc;
    int sign = 1;
    if (peek() == '-') {
      ++pos_;
      sign = -1;
    } else if (peek() == '+') {
      ++pos_;
    }
    acc = add(acc, parse_product(), sign);
    while (true) {
      const char c = peek();
      if (c != '+' && c != '-') break;
      ++pos_;
      acc = add(acc, parse_product(), c == '+' ? 1 : -1);
    }
    return acc;
  }

  RatPoly parse_product() {
    RatPoly acc = parse_factor();
    while (true) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        acc = mul(acc, parse_factor());
      } else if (c == '/') {
        ++pos_;
        const std::size_t at = pos_;
        mpz_class d = integer();
        if (d == 0) throw SyntaxError(at, "division by zero");
        acc = mul(acc, constant(mpq_class(1, 1) / mpq_class(d)));
      } else {
        break;
      }
    }
    return acc;
  }

  RatPoly parse_factor() {
    RatPoly base = parse_primary();
    if (peek() == '^') {
      ++pos_;
      const std::size_t at = pos_;
      mpz_class e = integer();
      if (e > kMaxExponent) throw SyntaxError(at, "exponent too large");
      RatPoly result = constant(1);
      for (unsigned long i = 0; i < e.get_ui(); ++i) result = mul(result, base);
      return result;
    }
    return base;
  }

  RatPoly parse_primary() {
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) return constant(mpq_class(integer()));
    if (c == '(') {
      ++pos_;
      RatPoly inner = parse_expr();
      expect(')');
      return inner;
    }
    if (c == 'x' || c == 'y') {
      ++pos_;
      RatPoly p;
      p[c == 'x' ? BivariatePoly::Key{1, 0} : BivariatePoly::Key{0, 1}] = 1;
      return p;
    }
    if (c == '-') {
      ++pos_;
      return mul(constant(-1), parse_factor());
    }
    throw SyntaxError(pos_, c == '\0' ? "unexpected end of input" : std::string("unexpected '") + c + "'");
  }

  static void finish(Equation& eq, RatPoly rhs, std::size_t rhs_pos) {
    mpz_class l = 1;
    for (const auto& [k, c] : rhs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    std::map<BivariatePoly::Key, mpz_class> terms;
    for (const auto& [k, c] : rhs) {
      mpq_class scaled = c * l;
      terms[k] = scaled.get_num();
    }
    eq.lhs.b *= l;
    eq.rhs.poly = BivariatePoly(std::move(terms));
    const auto& poly = eq.rhs.poly;
    if (!poly.uses_x() && !poly.uses_y()) throw SyntaxError(rhs_pos, "right-hand side must involve x");
    if (!poly.uses_y()) {
      eq.rhs.kind = RhsKind::Univariate;
    } else if (poly.is_homogeneous() && poly.total_degree() >= 2 && poly.uses_x()) {
      eq.rhs.kind = RhsKind::BinaryForm;
    } else {
      eq.rhs.kind = RhsKind::Bivariate;
    }
    if (eq.constraints.form_declared && eq.rhs.kind != RhsKind::BinaryForm) {
      throw Error(ErrorKind::Semantic, "right-hand side declared as form is not a homogeneous binary form of degree >= 2");
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Equation parse_equation(std::string_view text) { return Parser(text).parse(); }

std::string print_lhs(const FactorialProductLHS& lhs) {
  std::string out = lhs.b.get_str();
  for (const auto& t : lhs.factorials) {
    out += " * " + t.var + (t.kind == FactorialKind::Double ? "!!" : "!");
    if (t.kind == FactorialKind::Bhargava && !t.set.is_integers()) out += "*" + t.set.to_string();
    if (t.base > 1) out += "*" + std::to_string(t.base) + "^" + t.var;
  }
  for (const auto& t : lhs.prime_powers) out += " * " + std::to_string(t.prime) + "^" + t.var;
  return out;
}

std::string print_equation(const Equation& eq) {
  std::string out = print_lhs(eq.lhs) + " = " + eq.rhs.poly.to_string();
  if (eq.constraints.coprime) out += " ; coprime";
  if (eq.constraints.form_declared) out += " ; form";
  return out;
}

nlohmann::json equation_to_json(const Equation& eq) {
  using nlohmann::json;
  json factorials = json::array();
  for (const auto& t : eq.lhs.factorials) {
    factorials.push_back({{"var", t.var},
                          {"kind", t.kind == FactorialKind::Double ? "double" : "bhargava"},
                          {"set", t.set.to_string()},
                          {"base", t.base}});
  }
  json powers = json::array();
  for (const auto& t : eq.lhs.prime_powers) powers.push_back({{"prime", t.prime}, {"var", t.var}});
  json terms = json::array();
  for (const auto& [k, c] : eq.rhs.poly.terms()) terms.push_back({k.first, k.second, c.get_str()});
  return json{{"lhs", {{"b", eq.lhs.b.get_str()}, {"factorials", factorials}, {"prime_powers", powers}}},
              {"rhs", {{"kind", rhs_kind_name(eq.rhs.kind)}, {"text", eq.rhs.poly.to_string()}, {"terms", terms}}},
              {"constraints", {{"coprime", eq.constraints.coprime}, {"form", eq.constraints.form_declared}}}};
}

}  // namespace pfde::model
