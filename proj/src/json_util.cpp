#include "lgtau/json_util.hpp"

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace lgtau {

nlohmann::json integer_to_json(const mpz_class &z)
{
    if (z >= std::numeric_limits<std::int64_t>::min() + 1 && z <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(z.get_si());
    return z.get_str();
}

mpz_class integer_from_json(const nlohmann::json &j)
{
    if (j.is_number_integer())
        return mpz_class(std::to_string(j.get<std::int64_t>()));
    if (j.is_string())
        return mpz_class(j.get<std::string>());
    throw std::invalid_argument("integer_from_json: expected integer or decimal string");
}

} // namespace lgtau
