#include "fcnscape/data.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fcnscape/random.hpp"

namespace fcnscape {

std::string to_string(SplitTag tag) {
    switch (tag) {
        case SplitTag::All: return "all";
        case SplitTag::Train: return "train";
        case SplitTag::Test: return "test";
    }
    return "all";
}

std::vector<std::string> Dataset::ids() const {
    std::vector<std::string> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.id);
    return out;
}

namespace {

Tensor stack(const Dataset& data, std::span<const std::size_t> indices, bool inputs) {
    if (indices.empty()) throw std::invalid_argument("stack: no samples selected");
    const Tensor& first = inputs ? data.pairs.at(indices[0]).input : data.pairs.at(indices[0]).target;
    const Shape chw = first.shape();
    std::vector<double> values;
    values.reserve(indices.size() * first.size());
    for (std::size_t i : indices) {
        const Tensor& t = inputs ? data.pairs.at(i).input : data.pairs.at(i).target;
        if (t.shape() != chw)
            throw std::invalid_argument("stack: sample '" + data.pairs[i].id + "' has shape " + to_string(t.shape()) +
                                        ", expected " + to_string(chw));
        values.insert(values.end(), t.data().begin(), t.data().end());
    }
    return Tensor({indices.size(), chw[0], chw[1], chw[2]}, std::move(values));
}

}  // namespace

Tensor stack_inputs(const Dataset& data, std::span<const std::size_t> indices) {
    return stack(data, indices, true);
}

Tensor stack_targets(const Dataset& data, std::span<const std::size_t> indices) {
    return stack(data, indices, false);
}

// ---------------------------------------------------------------------------
// PGM

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(const std::string& bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        const char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
}

std::size_t parse_positive(const std::string& token, const std::filesystem::path& path, const char* what) {
    if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
        token.size() > 9)
        throw std::runtime_error(path.string() + ": malformed PGM header (" + what + " '" + token + "')");
    const auto value = std::stoul(token);
    if (value == 0) throw std::runtime_error(path.string() + ": malformed PGM header (" + what + " is zero)");
    return value;
}

}  // namespace

Tensor read_pgm(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    std::size_t pos = 0;
    if (pgm_token(bytes, pos) != "P5") throw std::runtime_error(path.string() + ": not a binary PGM (missing P5 magic)");
    const std::size_t width = parse_positive(pgm_token(bytes, pos), path, "width");
    const std::size_t height = parse_positive(pgm_token(bytes, pos), path, "height");
    const std::size_t maxval = parse_positive(pgm_token(bytes, pos), path, "maxval");
    if (maxval > 255) throw std::runtime_error(path.string() + ": only 8-bit PGM is supported (maxval " + std::to_string(maxval) + ")");
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
        throw std::runtime_error(path.string() + ": malformed PGM header");
    ++pos;
    if (bytes.size() - pos != width * height)
        throw std::runtime_error(path.string() + ": expected " + std::to_string(width * height) + " pixels, found " +
                                 std::to_string(bytes.size() - pos) + " bytes");
    Tensor image({1, height, width});
    for (std::size_t i = 0; i < width * height; ++i) {
        const auto sample = static_cast<unsigned char>(bytes[pos + i]);
        image[i] = std::min(1.0, static_cast<double>(sample) / static_cast<double>(maxval));
    }
    return image;
}

void write_pgm(const std::filesystem::path& path, const Tensor& image) {
    if (!(image.rank() == 2 || (image.rank() == 3 && image.dim(0) == 1)))
        throw std::invalid_argument("write_pgm: expected [H,W] or [1,H,W], got " + to_string(image.shape()));
    const std::size_t h = image.dim(image.rank() - 2), w = image.dim(image.rank() - 1);
    std::string bytes = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    for (double v : image.data())
        bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
    write_file(path, bytes);
}

// ---------------------------------------------------------------------------
// FTSR

namespace {

constexpr char kFtsrMagic[4] = {'F', 'T', 'S', 'R'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(const std::string& bytes, std::size_t pos, int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(i)])) << (8 * i);
    return v;
}

}  // namespace

Tensor read_ftsr(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kFtsrMagic, 4) != 0)
        throw std::runtime_error(path.string() + ": not an FTSR file (bad magic)");
    const auto rank = static_cast<std::size_t>(get_le(bytes, 4, 4));
    if (rank == 0 || rank > 8 || bytes.size() < 8 + 4 * rank)
        throw std::runtime_error(path.string() + ": malformed FTSR header (rank " + std::to_string(rank) + ")");
    Shape shape(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        shape[i] = static_cast<std::size_t>(get_le(bytes, 8 + 4 * i, 4));
        if (shape[i] == 0) throw std::runtime_error(path.string() + ": malformed FTSR header (zero extent)");
    }
    const std::size_t header = 8 + 4 * rank;
    const std::size_t count = shape_size(shape);
    if (bytes.size() - header != 8 * count)
        throw std::runtime_error(path.string() + ": FTSR payload holds " + std::to_string(bytes.size() - header) +
                                 " bytes, shape " + to_string(shape) + " needs " + std::to_string(8 * count));
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = std::bit_cast<double>(get_le(bytes, header + 8 * i, 8));
    return Tensor(std::move(shape), std::move(values));
}

void write_ftsr(const std::filesystem::path& path, const Tensor& tensor) {
    std::string bytes(kFtsrMagic, 4);
    put_u32(bytes, static_cast<std::uint32_t>(tensor.rank()));
    for (auto extent : tensor.shape()) put_u32(bytes, static_cast<std::uint32_t>(extent));
    bytes.reserve(bytes.size() + 8 * tensor.size());
    for (double v : tensor.data()) put_u64(bytes, std::bit_cast<std::uint64_t>(v));
    write_file(path, bytes);
}

// ---------------------------------------------------------------------------
// Directory datasets

namespace {

Tensor load_image(const std::filesystem::path& path) {
    Tensor t = path.extension() == ".pgm" ? read_pgm(path) : read_ftsr(path);
    if (t.rank() == 2) t = t.reshaped({1, t.dim(0), t.dim(1)});
    if (t.rank() != 3) throw std::runtime_error(path.string() + ": expected a [C,H,W] image, got " + to_string(t.shape()));
    for (double& v : t.data()) {
        if (!std::isfinite(v)) throw std::runtime_error(path.string() + ": non-finite sample");
        v = std::clamp(v, 0.0, 1.0);
    }
    return t;
}

nlohmann::json provenance_json(const Provenance& p) {
    return {{"source", p.source}, {"seed", p.seed}, {"transforms", p.transforms}, {"warnings", p.warnings}};
}

}  // namespace

Dataset load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw std::runtime_error(dir.string() + ": not a directory");
    std::map<std::string, std::filesystem::path> inputs, targets;
    std::vector<std::string> problems;
    std::vector<std::filesystem::path> entries;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) entries.push_back(entry.path());
    std::sort(entries.begin(), entries.end());

    for (const auto& path : entries) {
        const std::string ext = path.extension().string();
        if (ext != ".pgm" && ext != ".ftsr") continue;
        const std::string stem = path.stem().string();
        auto ends_with = [&](const std::string& suffix) {
            return stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0;
        };
        if (ends_with("_in")) {
            if (!inputs.emplace(stem.substr(0, stem.size() - 3), path).second)
                problems.push_back(path.string() + ": duplicate input for id");
        } else if (ends_with("_gt")) {
            if (!targets.emplace(stem.substr(0, stem.size() - 3), path).second)
                problems.push_back(path.string() + ": duplicate target for id");
        } else {
            problems.push_back(path.string() + ": name must end in _in or _gt");
        }
    }
    for (const auto& [id, path] : inputs)
        if (!targets.count(id)) problems.push_back(path.string() + ": no matching " + id + "_gt file");
    for (const auto& [id, path] : targets)
        if (!inputs.count(id)) problems.push_back(path.string() + ": no matching " + id + "_in file");

    Dataset data;
    data.provenance.source = dir.string();
    for (const auto& [id, in_path] : inputs) {
        auto gt = targets.find(id);
        if (gt == targets.end()) continue;
        try {
            ImagePair pair{load_image(in_path), load_image(gt->second), id};
            if (pair.input.dim(1) != pair.target.dim(1) || pair.input.dim(2) != pair.target.dim(2))
                throw std::runtime_error(gt->second.string() + ": extents " + to_string(pair.target.shape()) +
                                         " do not match input " + to_string(pair.input.shape()));
            data.pairs.push_back(std::move(pair));
        } catch (const std::exception& e) {
            problems.push_back(e.what());
        }
    }
    if (!problems.empty()) {
        std::string message = "load_dir " + dir.string() + " failed:";
        for (const auto& p : problems) message += "\n  " + p;
        throw std::runtime_error(message);
    }

    const auto manifest = dir / "manifest.json";
    if (std::filesystem::exists(manifest)) {
        const auto j = nlohmann::json::parse(read_file(manifest), nullptr, false);
        if (!j.is_discarded() && j.contains("provenance")) {
            const auto& p = j["provenance"];
            data.provenance.seed = p.value("seed", std::uint64_t{0});
            data.provenance.transforms = p.value("transforms", std::vector<std::string>{});
            data.provenance.source = p.value("source", dir.string());
        }
    }
    return data;
}

void save_dir(const Dataset& data, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error(dir.string() + ": cannot create directory: " + ec.message());
    for (const auto& pair : data.pairs) {
        write_ftsr(dir / (pair.id + "_in.ftsr"), pair.input);
        write_ftsr(dir / (pair.id + "_gt.ftsr"), pair.target);
    }
    nlohmann::json manifest{{"count", data.size()},
                            {"split", to_string(data.split)},
                            {"ids", data.ids()},
                            {"provenance", provenance_json(data.provenance)}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Split / augmentation / patches

std::pair<Dataset, Dataset> split(const Dataset& data, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split: ratio must lie in (0, 1)");
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(data.size())));
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    Dataset train, test;
    train.split = SplitTag::Train;
    test.split = SplitTag::Test;
    train.provenance = test.provenance = data.provenance;
    std::ostringstream tag;
    tag << "split" << ratio << "@" << seed;
    train.provenance.transforms.push_back(tag.str());
    test.provenance.transforms.push_back(tag.str());
    for (std::size_t i : train_idx) train.pairs.push_back(data.pairs[i]);
    for (std::size_t i : test_idx) test.pairs.push_back(data.pairs[i]);
    if (train.empty() || test.empty()) {
        const std::string warning = "degenerate split of " + std::to_string(data.size()) + " pairs: " +
                                    std::to_string(train.size()) + " train / " + std::to_string(test.size()) + " test";
        train.provenance.warnings.push_back(warning);
        test.provenance.warnings.push_back(warning);
    }
    return {std::move(train), std::move(test)};
}

namespace {

// Counter-clockwise quarter turn of every [H,W] plane of a square [C,H,W] image.
Tensor rotate90(const Tensor& t) {
    const std::size_t c = t.dim(0), n = t.dim(1);
    Tensor out(t.shape());
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[(ch * n + i) * n + j] = t[(ch * n + j) * n + (n - 1 - i)];
    return out;
}

Tensor flip_horizontal(const Tensor& t) {
    const std::size_t c = t.dim(0), h = t.dim(1), w = t.dim(2);
    Tensor out(t.shape());
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) out[(ch * h + i) * w + j] = t[(ch * h + i) * w + (w - 1 - j)];
    return out;
}

}  // namespace

const std::vector<std::string>& augment8_names() {
    static const std::vector<std::string> names{"rot0",      "rot90",      "rot180",      "rot270",
                                                "flip_rot0", "flip_rot90", "flip_rot180", "flip_rot270"};
    return names;
}

Dataset augment8(const Dataset& data) {
    Dataset out;
    out.split = data.split;
    out.provenance = data.provenance;
    out.provenance.transforms.push_back("augment8");
    const auto& names = augment8_names();
    for (const auto& pair : data.pairs) {
        if (pair.input.dim(1) != pair.input.dim(2))
            throw std::invalid_argument("augment8: '" + pair.id + "' is not square " + to_string(pair.input.shape()));
        for (int flip = 0; flip < 2; ++flip) {
            Tensor in = flip ? flip_horizontal(pair.input) : pair.input;
            Tensor gt = flip ? flip_horizontal(pair.target) : pair.target;
            for (int rot = 0; rot < 4; ++rot) {
                out.pairs.push_back(ImagePair{in, gt, pair.id + "_" + names[static_cast<std::size_t>(flip * 4 + rot)]});
                in = rotate90(in);
                gt = rotate90(gt);
            }
        }
    }
    return out;
}

std::vector<std::size_t> patch_origins(std::size_t extent, std::size_t size, std::size_t overlap) {
    if (size == 0 || size > extent) throw std::invalid_argument("crop: patch size must be in [1, extent]");
    if (overlap >= size) throw std::invalid_argument("crop: overlap must be smaller than the patch size");
    std::vector<std::size_t> origins;
    for (std::size_t origin = 0;; origin += size - overlap) {
        if (origin + size >= extent) {
            origins.push_back(extent - size);
            break;
        }
        origins.push_back(origin);
    }
    return origins;
}

std::vector<ImagePair> crop_patches(const ImagePair& pair, std::size_t size, std::size_t overlap) {
    const std::size_t h = pair.input.dim(1), w = pair.input.dim(2);
    if (pair.target.dim(1) != h || pair.target.dim(2) != w)
        throw std::invalid_argument("crop_patches: input and target extents differ for '" + pair.id + "'");
    auto crop = [size](const Tensor& t, std::size_t y0, std::size_t x0) {
        const std::size_t c = t.dim(0), th = t.dim(1), tw = t.dim(2);
        Tensor out({c, size, size});
        for (std::size_t ch = 0; ch < c; ++ch)
            for (std::size_t i = 0; i < size; ++i)
                for (std::size_t j = 0; j < size; ++j) out[(ch * size + i) * size + j] = t[(ch * th + y0 + i) * tw + x0 + j];
        return out;
    };
    std::vector<ImagePair> patches;
    for (std::size_t y : patch_origins(h, size, overlap))
        for (std::size_t x : patch_origins(w, size, overlap))
            patches.push_back(ImagePair{crop(pair.input, y, x), crop(pair.target, y, x),
                                        pair.id + "_p" + std::to_string(y) + "_" + std::to_string(x)});
    return patches;
}

Dataset crop_dataset(const Dataset& data, std::size_t size, std::size_t overlap) {
    Dataset out;
    out.split = data.split;
    out.provenance = data.provenance;
    out.provenance.transforms.push_back("crop" + std::to_string(size) + "/" + std::to_string(overlap));
    for (const auto& pair : data.pairs)
        for (auto& patch : crop_patches(pair, size, overlap)) out.pairs.push_back(std::move(patch));
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic tasks

std::string to_string(SynthTask task) {
    return task == SynthTask::Blobs ? "blobs" : "denoise";
}

SynthTask parse_synth_task(const std::string& name) {
    if (name == "blobs") return SynthTask::Blobs;
    if (name == "denoise") return SynthTask::Denoise;
    throw std::invalid_argument("unknown synth task '" + name + "', expected blobs or denoise");
}

namespace {

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

ImagePair make_blobs(std::size_t size, std::size_t channels, double sigma, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double s = static_cast<double>(size);
    struct Ellipse {
        double cx, cy, rx, ry, angle;
    };
    struct Stroke {
        double ax, ay, bx, by, half_width;
    };
    std::vector<Ellipse> ellipses(2 + static_cast<std::size_t>(unit(rng) * 3.0));
    for (auto& e : ellipses)
        e = {unit(rng) * s, unit(rng) * s, s * (0.06 + 0.14 * unit(rng)), s * (0.06 + 0.14 * unit(rng)),
             unit(rng) * std::numbers::pi};
    std::vector<Stroke> strokes(1 + static_cast<std::size_t>(unit(rng) * 2.0));
    for (auto& st : strokes)
        st = {unit(rng) * s, unit(rng) * s, unit(rng) * s, unit(rng) * s, 0.5 + 0.5 * unit(rng)};

    Tensor mask({1, size, size});
    for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
            const double px = static_cast<double>(x) + 0.5, py = static_cast<double>(y) + 0.5;
            bool inside = false;
            for (const auto& e : ellipses) {
                const double dx = px - e.cx, dy = py - e.cy;
                const double u = (dx * std::cos(e.angle) + dy * std::sin(e.angle)) / e.rx;
                const double v = (-dx * std::sin(e.angle) + dy * std::cos(e.angle)) / e.ry;
                inside = inside || (u * u + v * v <= 1.0);
            }
            for (const auto& st : strokes)
                inside = inside || segment_distance(px, py, st.ax, st.ay, st.bx, st.by) <= st.half_width;
            mask[y * size + x] = inside ? 1.0 : 0.0;
        }
    }

    const double background = 0.2 + 0.15 * unit(rng);
    const double foreground = 0.65 + 0.15 * unit(rng);
    std::normal_distribution<double> noise(0.0, sigma);
    Tensor input({channels, size, size});
    for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t i = 0; i < size * size; ++i)
            input[c * size * size + i] =
                std::clamp(background + (foreground - background) * mask[i] + noise(rng), 0.0, 1.0);
    return ImagePair{std::move(input), std::move(mask), {}};
}

ImagePair make_texture(std::size_t size, std::size_t channels, double sigma, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Tensor clean({channels, size, size});
    const double s = static_cast<double>(size);
    for (std::size_t c = 0; c < channels; ++c) {
        struct Wave {
            double fx, fy, phase, amplitude;
        };
        std::vector<Wave> waves(3);
        for (auto& w : waves)
            w = {1.0 + std::floor(unit(rng) * 4.0), std::floor(unit(rng) * 5.0) - 2.0, unit(rng) * 2.0 * std::numbers::pi,
                 0.5 + 0.5 * unit(rng)};
        double lo = 1e300, hi = -1e300;
        double* plane = clean.data().data() + c * size * size;
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x) {
                double v = 0.0;
                for (const auto& w : waves)
                    v += w.amplitude * std::sin(2.0 * std::numbers::pi *
                                                    (w.fx * static_cast<double>(x) + w.fy * static_cast<double>(y)) / s +
                                                w.phase);
                plane[y * size + x] = v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        const double span = hi - lo > 1e-12 ? hi - lo : 1.0;
        for (std::size_t i = 0; i < size * size; ++i) plane[i] = 0.1 + 0.8 * (plane[i] - lo) / span;
    }
    std::normal_distribution<double> noise(0.0, sigma);
    Tensor noisy = clean;
    for (double& v : noisy.data()) v = std::clamp(v + noise(rng), 0.0, 1.0);
    return ImagePair{std::move(noisy), std::move(clean), {}};
}

}  // namespace

Dataset synth_generate(const SynthOptions& options) {
    if (options.size == 0 || options.channels == 0) throw std::invalid_argument("synth: size and channels must be positive");
    if (options.noise_sigma && *options.noise_sigma < 0.0) throw std::invalid_argument("synth: noise sigma must be >= 0");
    Dataset data;
    data.provenance.source = "synth:" + to_string(options.task);
    data.provenance.seed = options.seed;
    std::uniform_real_distribution<double> sigma_draw(0.05, 0.25);
    for (std::size_t i = 0; i < options.count; ++i) {
        std::mt19937_64 image_rng = make_rng(options.seed, i);
        ImagePair pair;
        if (options.task == SynthTask::Blobs) {
            pair = make_blobs(options.size, options.channels, options.noise_sigma.value_or(0.15), image_rng);
        } else {
            const double sigma = options.noise_sigma ? *options.noise_sigma : sigma_draw(image_rng);
            pair = make_texture(options.size, options.channels, sigma, image_rng);
        }
        char id[32];
        std::snprintf(id, sizeof(id), "%s_%04zu", to_string(options.task).c_str(), i);
        pair.id = id;
        data.pairs.push_back(std::move(pair));
    }
    return data;
}

}  // namespace fcnscape
