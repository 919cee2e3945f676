#pragma once

#include <gmpxx.h>

#include <cstdint>

#include "model.hpp"

namespace pfde::arith {

/// v_p of the left-hand side under an assignment, without expanding it.
/// Needs closed-form sets (Z or progressions) or double factorials; factorial
/// arguments may be arbitrarily large.
mpz_class factorial_product_valuation(const model::FactorialProductLHS& lhs,
                                      const model::Assignment& assignment, std::uint64_t p);

}  // namespace pfde::arith
