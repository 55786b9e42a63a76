#include "fcnscape/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fcnscape {

namespace {

constexpr const char* kFormat = "fcnscape-checkpoint-v1";

}  // namespace

nlohmann::json to_json(const ArchitectureSpec& spec) {
    return {{"id", to_string(spec.id)},
            {"depth", spec.depth},
            {"base_channels", spec.base_channels},
            {"residual_blocks_per_skip", spec.residual_blocks_per_skip},
            {"in_channels", spec.in_channels},
            {"out_channels", spec.out_channels}};
}

ArchitectureSpec architecture_from_json(const nlohmann::json& j) {
    ArchitectureSpec spec;
    spec.id = parse_architecture(j.at("id").get<std::string>());
    spec.depth = j.at("depth").get<std::size_t>();
    spec.base_channels = j.at("base_channels").get<std::size_t>();
    spec.residual_blocks_per_skip = j.value("residual_blocks_per_skip", std::vector<std::size_t>{});
    spec.in_channels = j.value("in_channels", std::size_t{1});
    spec.out_channels = j.value("out_channels", std::size_t{1});
    validate(spec);
    return spec;
}

std::filesystem::path blob_path(const std::filesystem::path& manifest) {
    return std::filesystem::path(manifest.string() + ".bin");
}

void save_checkpoint(const std::filesystem::path& manifest, const Checkpoint& checkpoint) {
    const Model model(checkpoint.spec);
    if (!checkpoint.params.same_layout(model.layout()))
        throw std::invalid_argument("save_checkpoint: parameters do not match architecture " + model.name());

    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : checkpoint.params.groups())
        groups.push_back({{"name", g.name}, {"role", to_string(g.role)}, {"shape", g.shape}});
    const nlohmann::json j{{"format", kFormat},
                           {"spec", to_json(checkpoint.spec)},
                           {"seed", checkpoint.seed},
                           {"param_count", checkpoint.params.size()},
                           {"blob", blob_path(manifest).filename().string()},
                           {"dtype", "f64le"},
                           {"groups", groups},
                           {"provenance", checkpoint.provenance}};

    std::string blob;
    blob.reserve(8 * checkpoint.params.size());
    for (double v : checkpoint.params.values()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) blob.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
    std::ofstream bin(blob_path(manifest), std::ios::binary | std::ios::trunc);
    if (!bin) throw std::runtime_error(blob_path(manifest).string() + ": cannot open for writing");
    bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    std::ofstream out(manifest, std::ios::trunc);
    if (!out) throw std::runtime_error(manifest.string() + ": cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out || !bin) throw std::runtime_error(manifest.string() + ": write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw std::runtime_error(manifest.string() + ": cannot open checkpoint");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(manifest.string() + ": malformed checkpoint manifest: " + e.what());
    }
    if (j.value("format", std::string{}) != kFormat)
        throw std::runtime_error(manifest.string() + ": unsupported checkpoint format");

    Checkpoint ck;
    ck.spec = architecture_from_json(j.at("spec"));
    ck.seed = j.value("seed", std::uint64_t{0});
    ck.provenance = j.value("provenance", nlohmann::json::object());
    const Model model(ck.spec);
    const auto& layout = model.layout();
    const auto& groups = j.at("groups");
    if (groups.size() != layout.group_count())
        throw std::runtime_error(manifest.string() + ": manifest lists " + std::to_string(groups.size()) +
                                 " groups, architecture has " + std::to_string(layout.group_count()));
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = layout.group(i);
        if (groups[i].at("name").get<std::string>() != g.name || groups[i].at("shape").get<Shape>() != g.shape ||
            parse_group_role(groups[i].at("role").get<std::string>()) != g.role)
            throw std::runtime_error(manifest.string() + ": group " + std::to_string(i) + " ('" +
                                     groups[i].at("name").get<std::string>() + "') does not match the architecture");
    }

    const auto bin_path = manifest.parent_path() / j.at("blob").get<std::string>();
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw std::runtime_error(bin_path.string() + ": cannot open checkpoint blob");
    std::ostringstream buffer;
    buffer << bin.rdbuf();
    const std::string bytes = buffer.str();
    if (bytes.size() != 8 * layout.size())
        throw std::runtime_error(bin_path.string() + ": blob holds " + std::to_string(bytes.size()) + " bytes, expected " +
                                 std::to_string(8 * layout.size()));
    std::vector<double> values(layout.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 * i + static_cast<std::size_t>(b)])) << (8 * b);
        values[i] = std::bit_cast<double>(bits);
    }
    ck.params = layout.with_values(std::move(values));
    return ck;
}

}  // namespace fcnscape
