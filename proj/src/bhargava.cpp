#include "bhargava.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "arith.hpp"
#include "errors.hpp"

namespace pfde::bhargava {

SetSpec SetSpec::progression(std::uint64_t modulus, std::int64_t offset) {
  if (modulus < 1) fail(ErrorKind::InvalidArgument, "AP modulus must be >= 1");
  // n!_S is translation invariant, so only the residue of the offset matters
  const auto m = static_cast<std::int64_t>(modulus);
  std::int64_t r = offset % m;
  if (r < 0) r += m;
  return SetSpec(ArithmeticProgression{modulus, r});
}

SetSpec SetSpec::truncation(std::vector<std::int64_t> elements) {
  if (elements.size() < 2) {
    fail(ErrorKind::InvalidArgument, "explicit truncation needs at least 2 elements");
  }
  for (std::size_t i = 1; i < elements.size(); ++i) {
    if (elements[i] <= elements[i - 1]) {
      fail(ErrorKind::InvalidArgument, "explicit truncation must be strictly increasing");
    }
  }
  return SetSpec(ExplicitTruncation{std::move(elements)});
}

std::uint64_t SetSpec::closed_form_base() const {
  if (is_integers()) return 1;
  if (const auto* ap = std::get_if<ArithmeticProgression>(&v_)) return ap->modulus;
  fail(ErrorKind::InvalidArgument, "explicit truncation has no closed form");
}

std::string SetSpec::to_string() const {
  if (is_integers()) return "Z";
  if (const auto* ap = std::get_if<ArithmeticProgression>(&v_)) {
    return "AP(" + std::to_string(ap->modulus) + "," + std::to_string(ap->offset) + ")";
  }
  const auto& t = std::get<ExplicitTruncation>(v_);
  std::string out = "{";
  for (std::size_t i = 0; i < t.elements.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(t.elements[i]);
  }
  return out + "}";
}

namespace {

std::int64_t parse_int(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(ErrorKind::InvalidArgument, "bad integer '" + std::string(text) + "' in set spec");
  }
  return value;
}

std::vector<std::int64_t> split_ints(std::string_view body) {
  std::vector<std::int64_t> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    if (comma == std::string_view::npos) comma = body.size();
    out.push_back(parse_int(body.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

}  // namespace

SetSpec SetSpec::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text == "Z") return integers();
  if (text.starts_with("AP(") && text.ends_with(")")) {
    auto parts = split_ints(text.substr(3, text.size() - 4));
    if (parts.size() != 2 || parts[0] < 1) {
      fail(ErrorKind::InvalidArgument, "AP(A,b) needs A >= 1 and an offset b");
    }
    return progression(static_cast<std::uint64_t>(parts[0]), parts[1]);
  }
  if (text.starts_with("{") && text.ends_with("}")) {
    return truncation(split_ints(text.substr(1, text.size() - 2)));
  }
  fail(ErrorKind::InvalidArgument, "unknown set spec '" + std::string(text) + "'");
}

namespace {

std::uint64_t vp(std::int64_t diff, std::uint64_t p) {
  // differences of distinct elements are never zero
  unsigned __int128 v = diff < 0 ? static_cast<unsigned __int128>(-(static_cast<__int128>(diff)))
                                 : static_cast<unsigned __int128>(diff);
  std::uint64_t e = 0;
  while (v % p == 0) {
    v /= p;
    ++e;
  }
  return e;
}

POrdering greedy_ordering(const std::vector<std::int64_t>& candidates, std::uint64_t p,
                          std::uint64_t k) {
  POrdering out;
  out.p = p;
  if (candidates.size() < k + 1) {
    fail(ErrorKind::InvalidArgument, "truncation too short for a p-ordering of length " +
                                         std::to_string(k + 1));
  }
  std::vector<bool> used(candidates.size(), false);
  // running[j] = v_p of the product of (candidates[j] - chosen_i)
  std::vector<std::uint64_t> running(candidates.size(), 0);
  out.chosen.push_back(candidates[0]);
  out.valuations.push_back(0);
  used[0] = true;
  for (std::size_t j = 1; j < candidates.size(); ++j) running[j] = vp(candidates[j] - candidates[0], p);
  for (std::uint64_t step = 1; step <= k; ++step) {
    std::size_t best = candidates.size();
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (used[j]) continue;
      if (best == candidates.size() || running[j] < running[best]) best = j;
    }
    used[best] = true;
    out.chosen.push_back(candidates[best]);
    out.valuations.push_back(running[best]);
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (!used[j]) running[j] += vp(candidates[j] - candidates[best], p);
    }
  }
  return out;
}

std::vector<std::int64_t> natural_window(const SetSpec& s, std::uint64_t count) {
  std::vector<std::int64_t> out;
  out.reserve(count);
  std::int64_t modulus = 1, offset = 0;
  if (const auto* ap = std::get_if<ArithmeticProgression>(&s.variant())) {
    modulus = static_cast<std::int64_t>(ap->modulus);
    offset = ap->offset;
  }
  for (std::uint64_t j = 0; j < count; ++j) {
    out.push_back(offset + modulus * static_cast<std::int64_t>(j));
  }
  return out;
}

mpz_class assemble(const std::vector<std::uint64_t>& primes,
                   const std::vector<std::uint64_t>& exponents) {
  mpz_class value = 1;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), primes[i], exponents[i]);
    value *= pw;
  }
  return value;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
  return arith::sieve_primes(bound).primes();
}

// Stability-checked factorial of an explicit truncation. The value is computed
// on the prefix of length max(n+1, ceil(L/2)) and again on the whole list; any
// change in some w_p(k), k <= n, means the list is too short to stand in for S.
mpz_class truncation_factorial(const ExplicitTruncation& t, std::uint64_t n) {
  const auto& elems = t.elements;
  if (elems.size() < n + 1) {
    fail(ErrorKind::InvalidArgument, "truncation has " + std::to_string(elems.size()) +
                                         " elements, need at least " + std::to_string(n + 1));
  }
  if (n == 0) return 1;
  const std::size_t prefix_len = std::max<std::size_t>(n + 1, (elems.size() + 1) / 2);
  const std::vector<std::int64_t> prefix(elems.begin(), elems.begin() + prefix_len);
  const auto diameter = static_cast<std::uint64_t>(elems.back() - elems.front());
  const auto primes = primes_up_to(diameter);
  std::vector<std::uint64_t> exps;
  for (std::uint64_t p : primes) {
    const POrdering small = greedy_ordering(prefix, p, n);
    const POrdering large = greedy_ordering(elems, p, n);
    if (small.valuations != large.valuations) {
      fail(ErrorKind::Instability, "w_" + std::to_string(p) +
                                       " changed when enlarging the truncation " +
                                       SetSpec::truncation(elems).to_string());
    }
    exps.push_back(large.valuations[n]);
  }
  return assemble(primes, exps);
}

}  // namespace

POrdering p_ordering(const SetSpec& s, std::uint64_t p, std::uint64_t k) {
  if (!arith::is_prime(p)) fail(ErrorKind::InvalidArgument, std::to_string(p) + " is not prime");
  if (const auto* t = std::get_if<ExplicitTruncation>(&s.variant())) {
    return greedy_ordering(t->elements, p, k);
  }
  return greedy_ordering(natural_window(s, 2 * (k + 1)), p, k);
}

mpz_class factorial_from_orderings(const SetSpec& s, std::uint64_t n) {
  if (const auto* t = std::get_if<ExplicitTruncation>(&s.variant())) {
    return truncation_factorial(*t, n);
  }
  if (n == 0) return 1;
  // no prime above the diameter of the first n+1 elements divides a difference
  const std::uint64_t diameter = s.closed_form_base() * n;
  const auto primes = primes_up_to(diameter);
  std::vector<std::uint64_t> exps;
  for (std::uint64_t p : primes) exps.push_back(p_ordering(s, p, n).valuations[n]);
  return assemble(primes, exps);
}

mpz_class bhargava_factorial(const SetSpec& s, std::uint64_t n) {
  if (const auto* t = std::get_if<ExplicitTruncation>(&s.variant())) {
    return truncation_factorial(*t, n);
  }
  mpz_class value = arith::factorial(n);
  const std::uint64_t base = s.closed_form_base();
  if (base > 1) {
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), base, n);
    value *= pw;
  }
  return value;
}

mpz_class double_factorial(std::uint64_t n) {
  mpz_class r;
  mpz_2fac_ui(r.get_mpz_t(), n);
  return r;
}

}  // namespace pfde::bhargava
