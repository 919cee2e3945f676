#pragma once

#include <gmpxx.h>

#include <json.hpp>

namespace pfde {

// Integers travel as JSON numbers when they fit in int64, else as decimal strings.
nlohmann::json mpz_to_json(const mpz_class& v);
mpz_class mpz_from_json(const nlohmann::json& j);

}  // namespace pfde
