#pragma once

// Generalized (Bhargava) factorials n!_S via p-orderings.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pfde::bhargava {

struct FullIntegers {
  bool operator==(const FullIntegers&) const = default;
};

/// { A*k + b : k in Z } with A >= 1. The offset is kept normalized to [0, A).
struct ArithmeticProgression {
  std::uint64_t modulus = 1;
  std::int64_t offset = 0;
  bool operator==(const ArithmeticProgression&) const = default;
};

/// Finite, strictly increasing prefix of some infinite S.
struct ExplicitTruncation {
  std::vector<std::int64_t> elements;
  bool operator==(const ExplicitTruncation&) const = default;
};

class SetSpec {
 public:
  using Variant = std::variant<FullIntegers, ArithmeticProgression, ExplicitTruncation>;

  SetSpec() = default;
  static SetSpec integers() { return SetSpec(FullIntegers{}); }
  static SetSpec progression(std::uint64_t modulus, std::int64_t offset);
  static SetSpec truncation(std::vector<std::int64_t> elements);

  const Variant& variant() const noexcept { return v_; }
  bool is_integers() const { return std::holds_alternative<FullIntegers>(v_); }
  bool is_progression() const { return std::holds_alternative<ArithmeticProgression>(v_); }
  bool is_truncation() const { return std::holds_alternative<ExplicitTruncation>(v_); }
  // Z or an arithmetic progression: closed-form factorials exist.
  bool has_closed_form() const { return !is_truncation(); }
  // Modulus A such that n!_S = A^n n!; 1 for Z. Only valid with a closed form.
  std::uint64_t closed_form_base() const;

  // Canonical text: `Z`, `AP(A,b)` or `{e1,e2,...}`.
  std::string to_string() const;
  static SetSpec parse(std::string_view text);

  bool operator==(const SetSpec&) const = default;

 private:
  explicit SetSpec(Variant v) : v_(std::move(v)) {}
  Variant v_ = FullIntegers{};
};

struct POrdering {
  std::uint64_t p = 2;
  std::vector<std::int64_t> chosen;
  std::vector<std::uint64_t> valuations;  // valuations[k] = w_p(k)
};

/// Greedy p-ordering of length k+1. For Z and progressions the candidates are
/// the first 2(k+1) elements in natural order; ties go to the earliest element.
POrdering p_ordering(const SetSpec& s, std::uint64_t p, std::uint64_t k);

/// n!_S. Closed forms for Z and progressions; explicit truncations are
/// computed from p-orderings and checked for stability (see .cpp).
mpz_class bhargava_factorial(const SetSpec& s, std::uint64_t n);

/// n!_S assembled from p-orderings for every relevant prime, without using any
/// closed form. Used to cross-check the closed forms.
mpz_class factorial_from_orderings(const SetSpec& s, std::uint64_t n);

/// n!! with 0!! = 1!! = 1.
mpz_class double_factorial(std::uint64_t n);

}  // namespace pfde::bhargava
