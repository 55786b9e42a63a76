#include "fcnscape/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fcnscape/random.hpp"
#include "fcnscape/surface_io.hpp"

namespace fcnscape {

void validate(const TrainConfig& c) {
    if (c.batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
    if (!(c.momentum >= 0.0 && c.momentum < 1.0))
        throw std::invalid_argument("momentum must lie in [0, 1), got " + std::to_string(c.momentum));
    if (!(c.lr >= 0.0) || !std::isfinite(c.lr))
        throw std::invalid_argument("learning rate must be non-negative, got " + std::to_string(c.lr));
    if (c.target_loss && !(*c.target_loss >= 0.0)) throw std::invalid_argument("target loss must be non-negative");
}

nlohmann::json to_json(const TrainConfig& c) {
    nlohmann::json j = {{"batch_size", c.batch_size}, {"momentum", c.momentum}, {"lr", c.lr},
                        {"epochs", c.epochs},         {"seed", c.seed},         {"shuffle", c.shuffle},
                        {"reduction", to_string(c.reduction)}};
    j["target_loss"] = c.target_loss ? nlohmann::json(*c.target_loss) : nlohmann::json(nullptr);
    return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.batch_size = j.value("batch_size", c.batch_size);
    c.momentum = j.value("momentum", c.momentum);
    c.lr = j.value("lr", c.lr);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    c.shuffle = j.value("shuffle", c.shuffle);
    if (j.contains("reduction")) c.reduction = parse_reduction(j.at("reduction").get<std::string>());
    if (j.contains("target_loss") && !j.at("target_loss").is_null()) c.target_loss = j.at("target_loss").get<double>();
    return c;
}

void sgd_step(std::span<double> params, std::span<const double> grads, std::span<double> velocity,
              const TrainConfig& config) {
    if (params.size() != grads.size() || params.size() != velocity.size())
        throw std::invalid_argument("sgd_step: params, grads and velocity must have equal length");
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = config.momentum * velocity[i] - config.lr * grads[i];
        params[i] += velocity[i];
    }
}

std::string TrainLog::to_csv() const {
    std::string out = "epoch,train_loss,test_loss\n";
    for (const auto& e : epochs) {
        out += std::to_string(e.epoch) + "," + format_real(e.train_loss) + ",";
        if (e.test_loss) out += format_real(*e.test_loss);
        out += "\n";
    }
    return out;
}

std::string TrainLog::timing_csv() const {
    std::string out = "epoch,wall_seconds\n";
    for (const auto& e : epochs) out += std::to_string(e.epoch) + "," + format_real(e.wall_seconds) + "\n";
    return out;
}

nlohmann::json TrainLog::to_json(bool include_timing) const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : epochs) {
        nlohmann::json row = {{"epoch", e.epoch}, {"train_loss", e.train_loss}};
        row["test_loss"] = e.test_loss ? nlohmann::json(*e.test_loss) : nlohmann::json(nullptr);
        if (include_timing) row["wall_seconds"] = e.wall_seconds;
        rows.push_back(row);
    }
    nlohmann::json j = {{"epochs", rows}, {"best_epoch", best_epoch}, {"diverged", diverged}};
    if (diverged) j["divergence_report"] = divergence_report;
    j["target_epoch"] = target_epoch ? nlohmann::json(*target_epoch) : nlohmann::json(nullptr);
    return j;
}

namespace {

bool finite(std::span<const double> xs) { return all_finite(xs); }

}  // namespace

TrainResult train(const Network& model, const Dataset& train_set, const Dataset& test_set, const TrainConfig& config,
                  const std::optional<ParamSet>& init) {
    validate(config);
    if (train_set.empty()) throw std::invalid_argument("train: training set is empty");
    TrainResult result;
    result.initial = init ? *init : model.initial_params(config.seed);
    if (!result.initial.same_layout(model.layout()))
        throw std::invalid_argument("train: initial parameters do not match the model layout");

    const NetworkLoss train_loss(model, train_set, config.reduction);
    std::optional<NetworkLoss> test_loss;
    if (!test_set.empty()) test_loss.emplace(model, test_set, config.reduction);

    std::vector<double> theta(result.initial.values().begin(), result.initial.values().end());
    std::vector<double> velocity(theta.size(), 0.0);
    result.best = result.initial;
    result.last = result.initial;
    double best_loss = train_loss.value(theta);

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(config.seed, 0x6f72646572ULL);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t begin = 0; begin < order.size() && !result.log.diverged; begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            const std::span<const std::size_t> batch(order.data() + begin, end - begin);
            Graph graph;
            const Var x = graph.constant(stack_inputs(train_set, batch));
            const Var pred = model.forward(graph, theta, x);
            const Var loss = mse_loss(pred, stack_targets(train_set, batch), config.reduction);
            const double batch_loss = loss.value()[0];
            const auto grads = graph.backward(loss, theta.size());
            if (!std::isfinite(batch_loss) || !finite(grads)) {
                result.log.diverged = true;
                result.log.divergence_report = "non-finite loss or gradient in epoch " + std::to_string(epoch) +
                                               " at batch starting at sample " + std::to_string(begin) +
                                               " (batch loss " + format_real(batch_loss) + ")";
                break;
            }
            sgd_step(theta, grads, velocity, config);
            if (!finite(theta)) {
                result.log.diverged = true;
                result.log.divergence_report = "non-finite parameters after an update in epoch " +
                                               std::to_string(epoch) + " at batch starting at sample " +
                                               std::to_string(begin);
            }
        }
        if (result.log.diverged) break;

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = train_loss.value(theta);
        if (!std::isfinite(record.train_loss)) {
            result.log.diverged = true;
            result.log.divergence_report = "non-finite train loss after epoch " + std::to_string(epoch);
            break;
        }
        if (test_loss) record.test_loss = test_loss->value(theta);
        record.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.log.epochs.push_back(record);

        result.last = result.initial.with_values(theta);
        if (config.keep_snapshots) result.snapshots.push_back(result.last);
        if (result.log.best_epoch == 0 || record.train_loss < best_loss) {
            best_loss = record.train_loss;
            result.log.best_epoch = epoch;
            result.best = result.last;
        }
        if (config.target_loss && record.train_loss <= *config.target_loss) {
            result.log.target_epoch = epoch;
            break;
        }
    }
    return result;
}

StopResult stop_at_loss(const Network& model, const Dataset& train_set, const Dataset& test_set, TrainConfig config,
                        double target_loss, const std::optional<ParamSet>& init) {
    if (!(target_loss >= 0.0)) throw std::invalid_argument("stop_at_loss: target loss must be non-negative");
    config.target_loss = target_loss;
    StopResult out;
    out.run = train(model, train_set, test_set, config, init);
    if (out.run.log.target_epoch) {
        out.reached = true;
        out.epoch = *out.run.log.target_epoch;
        out.params = out.run.last;
        out.train_loss = out.run.log.epochs.back().train_loss;
    } else {
        out.epoch = out.run.log.best_epoch;
        out.params = out.run.best;
        out.train_loss = out.epoch ? out.run.log.epochs.at(out.epoch - 1).train_loss : 0.0;
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace fcnscape
