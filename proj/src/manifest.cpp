#include "lgtau/manifest.hpp"

#include <cstdio>

namespace lgtau {

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

nlohmann::json to_json(const RunManifest &m)
{
    nlohmann::json j;
    j["command"] = m.command;
    j["config"] = m.config;
    j["version"] = m.version;
    j["input_hashes"] = m.input_hashes;
    j["outputs"] = m.outputs;
    return j;
}

} // namespace lgtau
