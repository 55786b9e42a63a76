#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fcnscape/landscape.hpp"

namespace fcnscape {

enum class SurfaceFormat { Csv, Json };

// Csv writes `path` (first row: beta coordinates, first column: alpha
// coordinates, body: F, 17 significant digits) plus a `<path>.json` metadata
// sidecar. Json writes a single document holding metadata and values.
void export_surface(const LossSurface& surface, const std::filesystem::path& path,
                    SurfaceFormat format = SurfaceFormat::Csv);

// Reads either format back; a CSV must have its sidecar next to it.
LossSurface import_surface(const std::filesystem::path& path);

nlohmann::json surface_metadata(const LossSurface& surface);

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

// Shortest text that parses back to the same double (17 significant digits).
std::string format_real(double value);

}  // namespace fcnscape
