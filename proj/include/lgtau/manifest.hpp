#pragma once

// Provenance record written next to every CLI output. Deterministic: no
// timestamps or host data, so identical inputs give identical bytes.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lgtau {

inline constexpr const char *kVersion = "0.1.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
/// fnv1a64 as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view data);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::string version = kVersion;
    /// name -> hash of the input (config text, argument string, ...).
    std::map<std::string, std::string> input_hashes;
    std::vector<std::string> outputs;
};

nlohmann::json to_json(const RunManifest &m);

} // namespace lgtau
