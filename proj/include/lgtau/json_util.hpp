#pragma once

#include <gmpxx.h>
#include <json.hpp>

namespace lgtau {

/// Integer as a JSON number when it fits in int64, otherwise a decimal string.
nlohmann::json integer_to_json(const mpz_class &z);

/// Inverse of integer_to_json; accepts numbers and decimal strings.
mpz_class integer_from_json(const nlohmann::json &j);

} // namespace lgtau
