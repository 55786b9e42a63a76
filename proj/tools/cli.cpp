#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fcnscape/checkpoint.hpp"
#include "fcnscape/data.hpp"
#include "fcnscape/landscape.hpp"
#include "fcnscape/metrics.hpp"
#include "fcnscape/models.hpp"
#include "fcnscape/random.hpp"
#include "fcnscape/sharpness.hpp"
#include "fcnscape/surface_io.hpp"
#include "fcnscape/train.hpp"

namespace fcnscape::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Globals {
    std::uint64_t seed = 0;
    std::string out;
    std::string config;
};

void add_globals(CLI::App& sub, Globals& g, bool out_required) {
    sub.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    auto* out = sub.add_option("--out", g.out, "Output directory");
    if (out_required) out->required();
    sub.add_option("--config", g.config, "JSON file supplying values for flags not given on the command line");
}

json globals_json(const std::string& command, const Globals& g) {
    json j = {{"command", command}, {"seed", g.seed}};
    if (!g.out.empty()) j["out"] = g.out;
    return j;
}

struct DataOptions {
    std::string dir;
    double split = 0.7;
    std::uint64_t split_seed = 0;
    bool augment = false;
    std::string subset = "train";
};

struct DataFlags {
    CLI::Option* dir = nullptr;
    CLI::Option* split = nullptr;
    CLI::Option* split_seed = nullptr;
    CLI::Option* augment = nullptr;
};

DataFlags add_data_options(CLI::App& sub, DataOptions& d, bool with_subset) {
    DataFlags f;
    f.dir = sub.add_option("--data", d.dir, "Dataset directory of <id>_in / <id>_gt pairs");
    f.split = sub.add_option("--split", d.split, "Train fraction of the train/test split")
                  ->capture_default_str()
                  ->check(CLI::Range(0.0, 1.0));
    f.split_seed = sub.add_option("--split-seed", d.split_seed, "Seed of the train/test split")->capture_default_str();
    f.augment = sub.add_flag("--augment", d.augment, "Expand the selected pairs eightfold by flips and rotations");
    if (with_subset)
        sub.add_option("--subset", d.subset, "Pairs to use")
            ->capture_default_str()
            ->check(CLI::IsMember({"train", "test", "all"}));
    return f;
}

json data_json(const DataOptions& d, bool with_subset) {
    json j = {{"data", d.dir}, {"split", d.split}, {"split-seed", d.split_seed}, {"augment", d.augment}};
    if (with_subset) j["subset"] = d.subset;
    return j;
}

// Fills data options not given on the command line from a training run's
// checkpoint provenance.
void inherit_data(DataOptions& d, const DataFlags& f, const json& provenance) {
    if (!f.dir->count() && provenance.contains("data")) d.dir = provenance.at("data").get<std::string>();
    if (!f.split->count() && provenance.contains("split")) d.split = provenance.at("split").get<double>();
    if (!f.split_seed->count() && provenance.contains("split_seed"))
        d.split_seed = provenance.at("split_seed").get<std::uint64_t>();
    if (!f.augment->count() && provenance.contains("augment") && d.subset == "train")
        d.augment = provenance.at("augment").get<bool>();
}

Dataset load_nonempty(const std::string& dir) {
    if (dir.empty()) throw UsageError("no dataset given: pass --data");
    Dataset all = load_dir(dir);
    if (all.empty()) throw std::runtime_error(dir + ": no image pairs found");
    return all;
}

Dataset select_data(const DataOptions& d) {
    Dataset all = load_nonempty(d.dir);
    Dataset chosen;
    if (d.subset == "all") {
        chosen = std::move(all);
    } else {
        auto [train_set, test_set] = split(all, d.split, d.split_seed);
        chosen = d.subset == "train" ? std::move(train_set) : std::move(test_set);
    }
    if (chosen.empty()) throw std::runtime_error(d.dir + ": the " + d.subset + " subset is empty");
    return d.augment ? augment8(chosen) : chosen;
}

void prepare_out(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw std::runtime_error(out + ": cannot create directory: " + ec.message());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

Reduction reduction_for(const std::string& flag, const json& provenance) {
    if (!flag.empty()) return parse_reduction(flag);
    if (provenance.contains("train") && provenance.at("train").contains("reduction"))
        return parse_reduction(provenance.at("train").at("reduction").get<std::string>());
    return Reduction::MeanPerElement;
}

std::string dataset_label(const DataOptions& d) { return d.dir + ":" + d.subset + (d.augment ? "+augment8" : ""); }

// ---------------------------------------------------------------------------

struct SynthArgs {
    Globals g;
    std::string task;
    std::size_t count = 64;
    std::size_t size = 32;
    std::size_t channels = 1;
    double noise = -1.0;
    CLI::Option* noise_flag = nullptr;
};

void setup_synth(CLI::App& app, SynthArgs& a) {
    auto* sub = app.add_subcommand("synth", "Generate a synthetic image-to-image dataset");
    add_globals(*sub, a.g, true);
    sub->add_option("--task", a.task, "blobs or denoise")->required()->check(CLI::IsMember({"blobs", "denoise"}));
    sub->add_option("--count", a.count, "Number of pairs")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--size", a.size, "Image height and width")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--channels", a.channels, "Input channels")->capture_default_str()->check(CLI::PositiveNumber);
    a.noise_flag = sub->add_option("--noise", a.noise, "Fixed noise sigma")->check(CLI::NonNegativeNumber);
}

int run_synth(const SynthArgs& a, std::ostream& out) {
    SynthOptions o;
    o.task = parse_synth_task(a.task);
    o.count = a.count;
    o.size = a.size;
    o.channels = a.channels;
    o.seed = a.g.seed;
    if (a.noise_flag->count()) o.noise_sigma = a.noise;
    json config = globals_json("synth", a.g);
    config.update({{"task", a.task}, {"count", a.count}, {"size", a.size}, {"channels", a.channels}});
    if (o.noise_sigma) config["noise"] = *o.noise_sigma;

    const Dataset data = synth_generate(o);
    prepare_out(a.g.out);
    write_json(fs::path(a.g.out) / "config.json", config);
    save_dir(data, a.g.out);
    out << "wrote " << data.size() << " pairs to " << a.g.out << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct ArchArgs {
    std::string arch = "unet";
    std::size_t depth = 3;
    std::size_t base = 8;
    std::vector<std::size_t> res_blocks;
};

void add_arch_options(CLI::App& sub, ArchArgs& a) {
    sub.add_option("--arch", a.arch, "fcn16s, fcn8s, fcn4s, unet or resskip")->capture_default_str();
    sub.add_option("--depth", a.depth, "Pooling levels")->capture_default_str()->check(CLI::PositiveNumber);
    sub.add_option("--base", a.base, "Channels at full resolution")->capture_default_str()->check(CLI::PositiveNumber);
    sub.add_option("--res-blocks", a.res_blocks, "Residual blocks per skip level, finest first (resskip)");
}

ArchitectureSpec arch_spec(const ArchArgs& a) {
    ArchitectureSpec s;
    s.id = parse_architecture(a.arch);
    s.depth = a.depth;
    s.base_channels = a.base;
    s.residual_blocks_per_skip = a.res_blocks;
    validate(s);
    return s;
}

struct TrainArgs {
    Globals g;
    DataOptions data;
    DataFlags data_flags;
    ArchArgs arch;
    TrainConfig config;
    std::string reduction = "mean_per_element";
    double target = 0.0;
    CLI::Option* target_flag = nullptr;
};

void setup_train(CLI::App& app, TrainArgs& a) {
    auto* sub = app.add_subcommand("train", "Train a network with minibatch SGD and momentum");
    add_globals(*sub, a.g, true);
    a.data_flags = add_data_options(*sub, a.data, false);
    a.data_flags.dir->required();
    add_arch_options(*sub, a.arch);
    sub->add_option("--batch", a.config.batch_size, "Minibatch size")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--momentum", a.config.momentum, "Momentum")->capture_default_str();
    sub->add_option("--lr", a.config.lr, "Learning rate")->capture_default_str();
    sub->add_option("--epochs", a.config.epochs, "Epoch budget")->capture_default_str();
    sub->add_option("--reduction", a.reduction, "mean_per_element or sum_per_sample")->capture_default_str();
    a.target_flag = sub->add_option("--target-loss", a.target, "Stop at the first epoch with train loss at or below this");
}

int run_train(TrainArgs& a, std::ostream& out, std::ostream& err) {
    const ArchitectureSpec spec = arch_spec(a.arch);
    TrainConfig config = a.config;
    config.seed = a.g.seed;
    config.reduction = parse_reduction(a.reduction);
    if (a.target_flag->count()) config.target_loss = a.target;
    validate(config);

    json cfg = globals_json("train", a.g);
    cfg.update(data_json(a.data, false));
    cfg.update({{"arch", a.arch.arch}, {"depth", a.arch.depth}, {"base", a.arch.base}});
    if (!a.arch.res_blocks.empty()) cfg["res-blocks"] = a.arch.res_blocks;
    cfg.update({{"batch", config.batch_size},
                {"momentum", config.momentum},
                {"lr", config.lr},
                {"epochs", config.epochs},
                {"reduction", to_string(config.reduction)}});
    if (config.target_loss) cfg["target-loss"] = *config.target_loss;

    const Dataset all = load_nonempty(a.data.dir);
    auto [train_set, test_set] = split(all, a.data.split, a.data.split_seed);
    if (a.data.augment) train_set = augment8(train_set);
    const Model model(spec);

    const fs::path dir = a.g.out;
    prepare_out(a.g.out);
    write_json(dir / "config.json", cfg);
    write_json(dir / "split.json", {{"train", train_set.ids()}, {"test", test_set.ids()}});

    const TrainResult result = train(model, train_set, test_set, config);
    write_text(dir / "train_log.csv", result.log.to_csv());
    write_json(dir / "train_log.json", result.log.to_json());
    write_text(dir / "timing.csv", result.log.timing_csv());

    json provenance = {{"command", "train"},         {"data", a.data.dir},     {"split", a.data.split},
                       {"split_seed", a.data.split_seed}, {"augment", a.data.augment}, {"train", to_json(config)}};
    auto save = [&](const std::string& name, const ParamSet& params, std::optional<std::size_t> epoch) {
        json p = provenance;
        p["checkpoint"] = name;
        p["epoch"] = epoch ? json(*epoch) : json(nullptr);
        save_checkpoint(dir / (name + ".ckpt"), Checkpoint{spec, config.seed, params, p});
    };
    save("initial", result.initial, std::size_t{0});
    save("best", result.best, result.log.best_epoch);
    save("last", result.last, result.log.epochs.empty() ? 0 : result.log.epochs.back().epoch);
    if (config.target_loss) {
        if (result.log.target_epoch)
            save("target", result.last, result.log.target_epoch);
        else
            save("target", result.best, result.log.best_epoch);
    }

    if (!result.log.epochs.empty()) {
        const auto& last = result.log.epochs.back();
        out << model.name() << ": " << result.log.epochs.size() << " epochs, final train loss "
            << format_real(last.train_loss);
        if (last.test_loss) out << ", test loss " << format_real(*last.test_loss);
        out << ", best epoch " << result.log.best_epoch << "\n";
    }
    if (config.target_loss)
        out << (result.log.target_epoch ? "target loss reached at epoch " + std::to_string(*result.log.target_epoch)
                                        : std::string("target loss not reached"))
            << "\n";
    if (result.log.diverged) {
        err << "training diverged: " << result.log.divergence_report << "\n";
        return kRuntimeError;
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct EvalInputs {
    std::string checkpoint;
    DataOptions data;
    DataFlags data_flags;
    std::string reduction;
};

void add_checkpoint_inputs(CLI::App& sub, EvalInputs& in, const std::string& default_subset, bool required) {
    auto* c = sub.add_option("--checkpoint", in.checkpoint, "Checkpoint manifest written by train");
    if (required) c->required();
    in.data.subset = default_subset;
    in.data_flags = add_data_options(sub, in.data, true);
}

struct SurfaceArgs {
    Globals g;
    EvalInputs in;
    std::size_t n = 40;
    double r = 0.5;
    std::size_t threads = 1;
    std::uint64_t direction_seed = 0;
    CLI::Option* direction_seed_flag = nullptr;
    std::string format = "csv";
};

void setup_surface(CLI::App& app, SurfaceArgs& a) {
    auto* sub = app.add_subcommand("surface", "Evaluate the loss on a 2-D slice around a checkpoint");
    add_globals(*sub, a.g, true);
    add_checkpoint_inputs(*sub, a.in, "train", true);
    sub->add_option("--reduction", a.in.reduction, "Loss reduction; defaults to the one used for training");
    sub->add_option("--n", a.n, "Grid intervals per axis (even)")->capture_default_str();
    sub->add_option("--r", a.r, "Half-width of the grid")->capture_default_str();
    sub->add_option("--threads", a.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    a.direction_seed_flag = sub->add_option("--direction-seed", a.direction_seed, "Direction seed; defaults to --seed");
    sub->add_option("--format", a.format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
}

int run_surface(SurfaceArgs& a, std::ostream& out) {
    const Checkpoint ck = load_checkpoint(a.in.checkpoint);
    inherit_data(a.in.data, a.in.data_flags, ck.provenance);
    const Reduction reduction = reduction_for(a.in.reduction, ck.provenance);
    const GridSpec grid{a.n, a.r};
    validate(grid);
    const std::uint64_t dir_seed = a.direction_seed_flag->count() ? a.direction_seed : a.g.seed;

    json cfg = globals_json("surface", a.g);
    cfg["checkpoint"] = a.in.checkpoint;
    cfg.update(data_json(a.in.data, true));
    cfg.update({{"reduction", to_string(reduction)},
                {"n", a.n},
                {"r", a.r},
                {"threads", a.threads},
                {"direction-seed", dir_seed},
                {"format", a.format}});

    const Model model(ck.spec);
    const Dataset data = select_data(a.in.data);
    const NetworkLoss loss(model, data, reduction);
    const DirectionPair dirs = sample_directions(ck.params, dir_seed);
    SurfaceOptions options;
    options.threads = a.threads;
    options.model = model.name();
    options.dataset = dataset_label(a.in.data);
    options.reduction = reduction;
    const LossSurface surface = evaluate_surface(loss, ck.params, dirs, grid, options);

    prepare_out(a.g.out);
    write_json(fs::path(a.g.out) / "config.json", cfg);
    const bool csv = a.format == "csv";
    const fs::path target = fs::path(a.g.out) / (csv ? "surface.csv" : "surface.json");
    export_surface(surface, target, csv ? SurfaceFormat::Csv : SurfaceFormat::Json);
    out << "wrote " << grid.points() << "x" << grid.points() << " surface to " << target.string() << " (centre loss "
        << format_real(surface.center_loss) << ")\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct SharpnessArgs {
    Globals g;
    EvalInputs in;
    std::vector<double> eps{0.1, 0.2};
    std::size_t repeats = 5;
    MaximizerConfig maximizer;
};

void setup_sharpness(CLI::App& app, SharpnessArgs& a) {
    auto* sub = app.add_subcommand("sharpness", "Estimate the epsilon-sharpness of a checkpoint");
    add_globals(*sub, a.g, true);
    add_checkpoint_inputs(*sub, a.in, "train", true);
    sub->add_option("--reduction", a.in.reduction, "Loss reduction; defaults to the one used for training");
    sub->add_option("--eps", a.eps, "Box size; repeat the flag for several")->capture_default_str();
    sub->add_option("--repeats", a.repeats, "Independent maximizer runs")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--starts", a.maximizer.starts, "Starts per run")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--steps", a.maximizer.steps, "Ascent steps per start")->capture_default_str();
    sub->add_option("--step-fraction", a.maximizer.step_fraction, "Step as a fraction of the box half-width")
        ->capture_default_str();
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

int run_sharpness(SharpnessArgs& a, std::ostream& out) {
    const Checkpoint ck = load_checkpoint(a.in.checkpoint);
    inherit_data(a.in.data, a.in.data_flags, ck.provenance);
    const Reduction reduction = reduction_for(a.in.reduction, ck.provenance);
    for (double e : a.eps)
        if (!(e > 0.0)) throw UsageError("--eps must be positive, got " + format_real(e));

    json cfg = globals_json("sharpness", a.g);
    cfg["checkpoint"] = a.in.checkpoint;
    cfg.update(data_json(a.in.data, true));
    cfg.update({{"reduction", to_string(reduction)},
                {"eps", a.eps},
                {"repeats", a.repeats},
                {"starts", a.maximizer.starts},
                {"steps", a.maximizer.steps},
                {"step-fraction", a.maximizer.step_fraction}});

    const Model model(ck.spec);
    const Dataset data = select_data(a.in.data);
    const NetworkLoss loss(model, data, reduction);

    std::vector<double> sorted = a.eps;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::vector<SharpnessResult>> runs;
    for (std::size_t rep = 0; rep < a.repeats; ++rep) {
        MaximizerConfig m = a.maximizer;
        m.seed = make_rng(a.g.seed, rep)();
        runs.push_back(sharpness_sweep(loss, ck.params, sorted, m));
    }

    json results = json::array();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        std::vector<double> phis, maxima;
        for (const auto& run : runs) {
            phis.push_back(run[i].phi);
            maxima.push_back(run[i].max_loss);
        }
        double mean = 0.0;
        for (double p : phis) mean += p;
        mean /= static_cast<double>(phis.size());
        results.push_back({{"epsilon", sorted[i]},
                           {"phi", phis},
                           {"mean_phi", mean},
                           {"median_phi", median(phis)},
                           {"max_loss", maxima}});
        out << "epsilon " << format_real(sorted[i]) << ": mean phi " << format_real(mean) << " over " << phis.size()
            << " repeats\n";
    }
    const json report = {{"model", model.name()},
                         {"checkpoint", a.in.checkpoint},
                         {"dataset", dataset_label(a.in.data)},
                         {"samples", data.size()},
                         {"reduction", to_string(reduction)},
                         {"center_loss", runs.front().front().center_loss},
                         {"results", results}};
    prepare_out(a.g.out);
    write_json(fs::path(a.g.out) / "config.json", cfg);
    write_json(fs::path(a.g.out) / "sharpness.json", report);
    return kOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
    Globals g;
    EvalInputs in;
    std::string predictions;
    std::size_t window = 11;
};

void setup_eval(CLI::App& app, EvalArgs& a) {
    auto* sub = app.add_subcommand("eval", "Score predictions with rand, voi, psnr and ssim");
    add_globals(*sub, a.g, false);
    add_checkpoint_inputs(*sub, a.in, "test", false);
    sub->add_option("--predictions", a.predictions, "Directory of <id>_pred images to score instead of a checkpoint");
    sub->add_option("--window", a.window, "SSIM window (odd)")->capture_default_str();
}

Tensor load_prediction(const fs::path& dir, const std::string& id) {
    for (const char* ext : {".ftsr", ".pgm"}) {
        const fs::path p = dir / (id + "_pred" + ext);
        if (!fs::exists(p)) continue;
        Tensor t = std::string(ext) == ".pgm" ? read_pgm(p) : read_ftsr(p);
        return t.rank() == 2 ? t.reshaped({1, t.dim(0), t.dim(1)}) : t;
    }
    throw std::runtime_error((dir / (id + "_pred.ftsr")).string() + ": prediction not found");
}

int run_eval(EvalArgs& a, std::ostream& out) {
    if (a.in.checkpoint.empty() == a.predictions.empty())
        throw UsageError("eval needs exactly one of --checkpoint or --predictions");
    std::optional<Checkpoint> ck;
    if (!a.in.checkpoint.empty()) {
        ck = load_checkpoint(a.in.checkpoint);
        inherit_data(a.in.data, a.in.data_flags, ck->provenance);
    }

    json cfg = globals_json("eval", a.g);
    if (ck) cfg["checkpoint"] = a.in.checkpoint;
    if (!a.predictions.empty()) cfg["predictions"] = a.predictions;
    cfg.update(data_json(a.in.data, true));
    cfg["window"] = a.window;

    const Dataset data = select_data(a.in.data);
    SsimOptions ssim_options;
    ssim_options.window = a.window;
    std::optional<Model> model;
    if (ck) model.emplace(ck->spec);
    const std::string name = model ? model->name() : fs::path(a.predictions).filename().string();

    std::vector<QualityReport> reports;
    json per_image = json::array();
    for (const auto& pair : data.pairs) {
        Tensor pred;
        if (model) {
            const Shape& s = pair.input.shape();
            const Tensor y = model->forward(ck->params, pair.input.reshaped({1, s[0], s[1], s[2]}));
            pred = y.reshaped({y.dim(1), y.dim(2), y.dim(3)});
        } else {
            pred = load_prediction(a.predictions, pair.id);
        }
        reports.push_back(evaluate_pair(pred, pair.target, ssim_options));
        json row = reports.back().to_json();
        row["id"] = pair.id;
        per_image.push_back(row);
    }
    const QualityReport mean = average(reports);
    out << format_table({{name, mean}});
    if (!a.g.out.empty()) {
        prepare_out(a.g.out);
        write_json(fs::path(a.g.out) / "config.json", cfg);
        write_json(fs::path(a.g.out) / "eval.json",
                   {{"model", name}, {"dataset", dataset_label(a.in.data)}, {"average", mean.to_json()},
                    {"images", per_image}});
    }
    return kOk;
}

// ---------------------------------------------------------------------------

std::string config_path(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    return path;
}

// Appends `--key value` tokens for every config entry whose flag is absent
// from the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    const std::string path = config_path(args);
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError(path + ": config must be a JSON object");
    if (j.contains("command") && !args.empty() && j.at("command") != args.front())
        throw UsageError(path + ": config is for '" + j.at("command").get<std::string>() + "', not '" + args.front() +
                         "'");
    auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    auto token = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    std::vector<std::string> expanded = args;
    for (const auto& [key, value] : j.items()) {
        const std::string flag = "--" + key;
        if (key == "command" || key == "config" || value.is_null() || given(flag)) continue;
        if (value.is_boolean()) {
            expanded.push_back(flag + "=" + (value.get<bool>() ? "true" : "false"));
        } else if (value.is_array()) {
            for (const auto& v : value) {
                expanded.push_back(flag);
                expanded.push_back(token(v));
            }
        } else {
            expanded.push_back(flag);
            expanded.push_back(token(value));
        }
    }
    return expanded;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Loss landscapes of fully convolutional networks", "fcnscape"};
    app.require_subcommand(1, 1);
    app.failure_message(CLI::FailureMessage::help);

    SynthArgs synth;
    TrainArgs train_args;
    SurfaceArgs surface;
    SharpnessArgs sharp;
    EvalArgs eval;
    setup_synth(app, synth);
    setup_train(app, train_args);
    setup_surface(app, surface);
    setup_sharpness(app, sharp);
    setup_eval(app, eval);

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }

    try {
        if (app.got_subcommand("synth")) return run_synth(synth, out);
        if (app.got_subcommand("train")) return run_train(train_args, out, err);
        if (app.got_subcommand("surface")) return run_surface(surface, out);
        if (app.got_subcommand("sharpness")) return run_sharpness(sharp, out);
        return run_eval(eval, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace fcnscape::cli
