#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcnscape/tensor.hpp"

namespace fcnscape {

// Input and target images, each [C,H,W] with values in [0,1].
struct ImagePair {
    Tensor input;
    Tensor target;
    std::string id;

    bool operator==(const ImagePair&) const = default;
};

enum class SplitTag { All, Train, Test };

std::string to_string(SplitTag tag);

struct Provenance {
    std::string source;
    std::uint64_t seed = 0;
    // Applied transforms in order, e.g. "crop256/128", "augment8".
    std::vector<std::string> transforms;
    std::vector<std::string> warnings;

    bool operator==(const Provenance&) const = default;
};

struct Dataset {
    std::vector<ImagePair> pairs;
    SplitTag split = SplitTag::All;
    Provenance provenance;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
    std::vector<std::string> ids() const;
};

// Stacks inputs (or targets) of the selected pairs into [B,C,H,W].
Tensor stack_inputs(const Dataset& data, std::span<const std::size_t> indices);
Tensor stack_targets(const Dataset& data, std::span<const std::size_t> indices);

// ---------------------------------------------------------------------------
// Image file formats

// 8-bit binary PGM (P5). Samples are scaled by 1/maxval into a [1,H,W] tensor.
Tensor read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Tensor& image);

// FTSR raw tensor: "FTSR", u32 rank, rank x u32 extents, little-endian f64 data.
Tensor read_ftsr(const std::filesystem::path& path);
void write_ftsr(const std::filesystem::path& path, const Tensor& tensor);

// ---------------------------------------------------------------------------
// Dataset operations

// Loads `<id>_in.{pgm,ftsr}` / `<id>_gt.{pgm,ftsr}` pairs sorted by id. Any
// unpaired or malformed file fails the whole load with per-file diagnostics.
Dataset load_dir(const std::filesystem::path& dir);

// Writes FTSR pairs plus manifest.json.
void save_dir(const Dataset& data, const std::filesystem::path& dir);

// Deterministic shuffled split; train receives round(ratio * n) pairs.
std::pair<Dataset, Dataset> split(const Dataset& data, double ratio, std::uint64_t seed);

// Four rotations times {identity, horizontal flip}, applied to input and
// target alike. Requires square images.
Dataset augment8(const Dataset& data);

// Names of the augment8 transforms in output order.
const std::vector<std::string>& augment8_names();

// Patches of `size` at stride size - overlap; the last patch on each axis is
// snapped to the border.
std::vector<ImagePair> crop_patches(const ImagePair& pair, std::size_t size, std::size_t overlap);
std::vector<std::size_t> patch_origins(std::size_t extent, std::size_t size, std::size_t overlap);
Dataset crop_dataset(const Dataset& data, std::size_t size, std::size_t overlap);

enum class SynthTask { Blobs, Denoise };

std::string to_string(SynthTask task);
SynthTask parse_synth_task(const std::string& name);

struct SynthOptions {
    SynthTask task = SynthTask::Blobs;
    std::size_t count = 64;
    std::size_t size = 32;
    std::uint64_t seed = 0;
    std::size_t channels = 1;
    // Fixed noise level; when unset blobs use 0.15 and denoise draws sigma
    // per image from [0.05, 0.25].
    std::optional<double> noise_sigma;
};

Dataset synth_generate(const SynthOptions& options);

}  // namespace fcnscape
