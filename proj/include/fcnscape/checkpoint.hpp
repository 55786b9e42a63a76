#pragma once

#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "fcnscape/models.hpp"

namespace fcnscape {

// A checkpoint is a JSON manifest (architecture, seed, group names and shapes,
// provenance) plus `<manifest>.bin`, the flat little-endian f64 values of all
// groups in enumeration order.
struct Checkpoint {
    ArchitectureSpec spec;
    std::uint64_t seed = 0;
    ParamSet params;
    nlohmann::json provenance = nlohmann::json::object();
};

nlohmann::json to_json(const ArchitectureSpec& spec);
ArchitectureSpec architecture_from_json(const nlohmann::json& j);

std::filesystem::path blob_path(const std::filesystem::path& manifest);

void save_checkpoint(const std::filesystem::path& manifest, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& manifest);

}  // namespace fcnscape
