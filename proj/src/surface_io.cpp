#include "fcnscape/surface_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fcnscape {

std::string format_real(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    return std::filesystem::path(csv.string() + ".json");
}

nlohmann::json surface_metadata(const LossSurface& surface) {
    return {{"n", surface.grid.n},
            {"r", surface.grid.r},
            {"rows", surface.grid.points()},
            {"center_loss", surface.center_loss},
            {"direction_seed", surface.direction_seed},
            {"model", surface.model},
            {"dataset", surface.dataset},
            {"reduction", to_string(surface.reduction)}};
}

namespace {

void apply_metadata(LossSurface& s, const nlohmann::json& j) {
    s.grid.n = j.at("n").get<std::size_t>();
    s.grid.r = j.at("r").get<double>();
    s.center_loss = j.at("center_loss").get<double>();
    s.direction_seed = j.at("direction_seed").get<std::uint64_t>();
    s.model = j.value("model", std::string{});
    s.dataset = j.value("dataset", std::string{});
    s.reduction = parse_reduction(j.at("reduction").get<std::string>());
}

double parse_real(const std::string& cell, const std::filesystem::path& path) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size())
        throw std::runtime_error(path.string() + ": malformed number '" + cell + "'");
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    return out;
}

}  // namespace

void export_surface(const LossSurface& surface, const std::filesystem::path& path, SurfaceFormat format) {
    const std::size_t side = surface.grid.points();
    if (surface.values.size() != side * side) throw std::invalid_argument("export_surface: value count does not match grid");
    if (format == SurfaceFormat::Json) {
        nlohmann::json j = surface_metadata(surface);
        j["values"] = surface.values;
        auto out = open_out(path);
        out << j.dump(2) << "\n";
        if (!out) throw std::runtime_error(path.string() + ": write failed");
        return;
    }

    auto out = open_out(path);
    out << "alpha\\beta";
    for (std::size_t k = 0; k < side; ++k) out << "," << format_real(surface.grid.coordinate(k));
    out << "\n";
    for (std::size_t t = 0; t < side; ++t) {
        out << format_real(surface.grid.coordinate(t));
        for (std::size_t k = 0; k < side; ++k) out << "," << format_real(surface.at(t, k));
        out << "\n";
    }
    if (!out) throw std::runtime_error(path.string() + ": write failed");
    auto meta = open_out(sidecar_path(path));
    meta << surface_metadata(surface).dump(2) << "\n";
    if (!meta) throw std::runtime_error(sidecar_path(path).string() + ": write failed");
}

LossSurface import_surface(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open surface");
    LossSurface s;
    if (path.extension() == ".json") {
        nlohmann::json j;
        in >> j;
        apply_metadata(s, j);
        s.values = j.at("values").get<std::vector<double>>();
    } else {
        std::ifstream meta(sidecar_path(path));
        if (!meta) throw std::runtime_error(sidecar_path(path).string() + ": missing surface metadata sidecar");
        nlohmann::json j;
        meta >> j;
        apply_metadata(s, j);
        std::string line;
        std::getline(in, line);  // beta header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream row(line);
            std::string cell;
            std::getline(row, cell, ',');  // alpha
            while (std::getline(row, cell, ',')) s.values.push_back(parse_real(cell, path));
        }
    }
    const std::size_t side = s.grid.points();
    if (s.values.size() != side * side)
        throw std::runtime_error(path.string() + ": expected " + std::to_string(side * side) + " values, read " +
                                 std::to_string(s.values.size()));
    return s;
}

}  // namespace fcnscape
